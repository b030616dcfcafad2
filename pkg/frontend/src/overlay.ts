/**
 * Overlay controller: wires the socket client to the state reducer and the
 * pure renderer. It never originates settings state — a control-panel
 * change sends set_setting and the mirror only updates when the daemon's
 * SettingsChanged broadcast comes back.
 */

import { DaemonClient } from "./client.js";
import {
  initialState,
  reduce,
  setConnection,
  setPersonas,
  tick,
  togglePanel,
  UiState,
} from "./state.js";
import { render, UiNode } from "./view.js";

export type Painter = (tree: UiNode) => void;

export class Overlay {
  private state: UiState = initialState();

  constructor(
    private readonly client: DaemonClient,
    private readonly paint: Painter,
    private readonly now: () => number = Date.now,
  ) {
    client.onEvent((event) => {
      this.state = reduce(this.state, event, this.now());
      this.repaint();
    });
  }

  async start(): Promise<void> {
    await this.client.connect();
    this.state = setConnection(this.state, "connected");
    this.state = setPersonas(this.state, await this.client.listPersonas());
    // Seed the mirror once from the daemon; all later updates come from
    // SettingsChanged broadcasts.
    this.state = { ...this.state, settings: await this.client.getSettings() };
    this.repaint();
  }

  /** Periodic housekeeping: expire bubble / emoji / error glyph. */
  pulse(): void {
    const next = tick(this.state, this.now());
    if (next !== this.state) {
      this.state = next;
      this.repaint();
    }
  }

  iconClicked(): void {
    this.state = togglePanel(this.state);
    this.repaint();
  }

  /** Panel interaction: fire-and-wait; the reducer applies the echo. */
  async changeSetting(key: string, value: unknown): Promise<string | null> {
    const reply = await this.client.setSetting(key, value);
    if (!reply.ok) return reply.error ?? "rejected";
    return null;
  }

  triggerFeedback(persona?: string): Promise<unknown> {
    return this.client.request(
      "trigger_feedback",
      persona ? { persona } : {},
    );
  }

  triggerEmoji(): Promise<unknown> {
    return this.client.request("trigger_emoji");
  }

  snapshot(): UiState {
    return this.state;
  }

  private repaint(): void {
    this.paint(render(this.state));
  }
}
