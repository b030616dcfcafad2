/**
 * Pure view: UiState in, a plain element tree out. Framework-free so the
 * same render runs under a real DOM adapter or headless in tests. The
 * overlay root is bottom-right, always-on-top, click-through except on the
 * icon; when idle the tree contains exactly the icon and nothing else.
 */

import { CYCLE_VALUES } from "./protocol.js";
import { UiState } from "./state.js";

export interface UiNode {
  tag: string;
  attrs: Record<string, string>;
  children: (UiNode | string)[];
}

export function el(
  tag: string,
  attrs: Record<string, string> = {},
  children: (UiNode | string)[] = [],
): UiNode {
  return { tag, attrs, children };
}

/** Depth-first search for every node with the given class token. */
export function findByClass(root: UiNode, cls: string): UiNode[] {
  const hits: UiNode[] = [];
  const walk = (node: UiNode) => {
    if ((node.attrs.class ?? "").split(" ").includes(cls)) hits.push(node);
    for (const child of node.children) {
      if (typeof child !== "string") walk(child);
    }
  };
  walk(root);
  return hits;
}

export function textOf(node: UiNode): string {
  return node.children
    .map((c) => (typeof c === "string" ? c : textOf(c)))
    .join("");
}

/** Highlight the suggestion sentence (contains "consider"/"improve"). */
export function splitHighlights(
  text: string,
): { text: string; highlight: boolean }[] {
  const sentences = text.match(/[^.!?]+[.!?]*\s*/g) ?? [text];
  return sentences.map((sentence) => ({
    text: sentence,
    highlight: /\b(consider|improve)/i.test(sentence),
  }));
}

function renderIcon(state: UiState): UiNode {
  const classes = ["icon"];
  if (state.inFlight) classes.push("spinning");
  if (state.connection === "disconnected") classes.push("dimmed");
  return el("button", {
    class: classes.join(" "),
    "data-icon": state.settings
      ? `duck-${state.settings.persona.replace("_", "-")}`
      : "duck",
    "data-action": "toggle-panel",
  });
}

function renderTranscript(state: UiState): UiNode | null {
  if (!state.transcript) return null;
  const spans = splitHighlights(state.transcript.text).map((part) =>
    el("span", { class: part.highlight ? "highlight" : "plain" }, [part.text]),
  );
  return el(
    "div",
    { class: "bubble", "data-event-id": state.transcript.eventId },
    spans,
  );
}

function renderEmoji(state: UiState): UiNode | null {
  if (!state.emoji) return null;
  return el(
    "div",
    { class: "emoji-float" },
    state.emoji.emojis.map((glyph) => el("span", { class: "emoji" }, [glyph])),
  );
}

function renderError(state: UiState): UiNode | null {
  if (state.errorUntil === null) return null;
  return el("div", { class: "error-glyph", title: "generation failed" }, ["!"]);
}

function renderSelect(
  name: string,
  options: readonly string[],
  active: string,
): UiNode {
  return el(
    "select",
    { class: "setting", "data-setting": name },
    options.map((value) =>
      el(
        "option",
        value === active ? { value, selected: "selected" } : { value },
        [value],
      ),
    ),
  );
}

function renderPanel(state: UiState): UiNode | null {
  if (!state.panelOpen || !state.settings) return null;
  const settings = state.settings;
  const grid = el(
    "div",
    { class: "persona-grid" },
    state.personas.map((persona) =>
      el(
        "button",
        {
          class:
            persona.id === settings.persona
              ? "persona-cell active"
              : "persona-cell",
          "data-persona": persona.id,
          "data-icon": persona.icon_ref,
          title: persona.display_name,
        },
        [persona.display_name],
      ),
    ),
  );
  return el("div", { class: "panel" }, [
    grid,
    renderSelect(
      "capture.mode",
      ["whole_screen", "active_window", "cursor_region"],
      settings["capture.mode"],
    ),
    renderSelect("cycle.voice", CYCLE_VALUES, settings["cycle.voice"]),
    renderSelect("cycle.emoji", CYCLE_VALUES, settings["cycle.emoji"]),
    el("input", {
      class: "setting",
      "data-setting": "memory_depth",
      type: "number",
      min: "0",
      value: String(settings.memory_depth),
    }),
  ]);
}

export function render(state: UiState): UiNode {
  const children: UiNode[] = [renderIcon(state)];
  for (const part of [
    renderTranscript(state),
    renderEmoji(state),
    renderError(state),
    renderPanel(state),
  ]) {
    if (part) children.push(part);
  }
  return el("div", { class: "overlay", "data-position": "bottom-right" }, children);
}
