/**
 * Control-panel round trip against a live daemon running with mock
 * providers: every persona and every cycle value is selected through the
 * client, confirmed by the SettingsChanged broadcast, and cross-checked
 * with the `settings get` CLI.
 */

import { ChildProcess, execFile, spawn } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { DaemonClient } from "../src/client.js";
import { Overlay } from "../src/overlay.js";
import { CYCLE_VALUES, SettingsChanged } from "../src/protocol.js";
import { findByClass, UiNode } from "../src/view.js";

const execFileAsync = promisify(execFile);

const PERSONA_IDS = [
  "mentor",
  "cheerleader",
  "critic",
  "designer",
  "analyst",
  "ceo",
  "friend",
  "no_persona",
];

let workDir: string;
let socket: string;
let daemon: ChildProcess;
let client: DaemonClient;

async function cliSettingsGet(key: string): Promise<string> {
  const { stdout } = await execFileAsync("python3", [
    "-m",
    "quac.cli",
    "settings",
    "get",
    key,
    "--socket",
    socket,
  ]);
  return stdout.trim();
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "quac-ui-"));
  socket = join(workDir, "quac.sock");
  const config = join(workDir, "config");
  writeFileSync(config, "cycle.voice = off\ncycle.emoji = off\n");
  daemon = spawn(
    "python3",
    [
      "-m",
      "quac.cli",
      "run",
      "--socket",
      socket,
      "--config",
      config,
      "--provider",
      "mock",
      "--capture",
      "fake",
      "--session-dir",
      join(workDir, "sessions"),
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  const deadline = Date.now() + 10_000;
  while (!existsSync(socket)) {
    if (daemon.exitCode !== null || Date.now() > deadline) {
      throw new Error("daemon failed to start");
    }
    await new Promise((r) => setTimeout(r, 50));
  }
  client = new DaemonClient(socket);
  await client.connect();
}, 20_000);

afterAll(async () => {
  client?.close();
  daemon?.kill("SIGTERM");
  await new Promise((r) => setTimeout(r, 300));
  daemon?.kill("SIGKILL");
  rmSync(workDir, { recursive: true, force: true });
});

describe("control-panel round trip", () => {
  it("selects every persona; SettingsChanged and `settings get` agree", async () => {
    for (const persona of PERSONA_IDS) {
      client.clearBacklog();
      const reply = await client.setSetting("persona", persona);
      expect(reply.ok).toBe(true);
      const event = (await client.waitEvent(
        "SettingsChanged",
      )) as SettingsChanged;
      expect(event.settings.persona).toBe(persona);
      expect(await cliSettingsGet("persona")).toBe(persona);
    }
  }, 60_000);

  it("selects every cycle value on both channels", async () => {
    for (const key of ["cycle.voice", "cycle.emoji"] as const) {
      for (const value of CYCLE_VALUES) {
        client.clearBacklog();
        const reply = await client.setSetting(key, value);
        expect(reply.ok).toBe(true);
        const event = (await client.waitEvent(
          "SettingsChanged",
        )) as SettingsChanged;
        expect(event.settings[key]).toBe(value);
        expect(await cliSettingsGet(key)).toBe(value);
      }
    }
  }, 60_000);

  it("surfaces the server's validation message for a rejected value", async () => {
    const reply = await client.setSetting("cycle.voice", "45s");
    expect(reply.ok).toBe(false);
    expect(reply.error).toMatch(/45s/);
  });

  it("drives the full overlay: mirror follows the broadcast, grid highlights", async () => {
    let lastTree: UiNode | null = null;
    const overlay = new Overlay(client, (tree) => {
      lastTree = tree;
    });
    await overlay.start();
    overlay.iconClicked(); // open the panel

    const error = await overlay.changeSetting("persona", "designer");
    expect(error).toBeNull();
    await client.waitEvent("SettingsChanged");
    expect(overlay.snapshot().settings?.persona).toBe("designer");
    const active = findByClass(lastTree!, "active");
    expect(active).toHaveLength(1);
    expect(active[0].attrs["data-persona"]).toBe("designer");
    expect(await cliSettingsGet("persona")).toBe("designer");
  }, 30_000);

  it("runs a feedback generation end to end over the client", async () => {
    client.clearBacklog();
    await client.setSetting("persona", "critic");
    await client.waitEvent("SettingsChanged");
    client.clearBacklog();
    const reply = await client.request("trigger_feedback");
    expect(reply.ok).toBe(true);
    const started = await client.waitEvent("GenerationStarted");
    expect((started as { persona: string }).persona).toBe("critic");
    const ready = (await client.waitEvent("FeedbackReady")) as {
      text: string;
      audio_duration: number;
    };
    expect(ready.text.length).toBeGreaterThan(0);
    expect(ready.audio_duration).toBeGreaterThan(0);
  }, 30_000);
});
