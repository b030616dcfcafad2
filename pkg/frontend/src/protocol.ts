/**
 * Wire types for the daemon's NDJSON control protocol (see docs/ipc.md).
 * One JSON object per line; commands get exactly one reply, events are
 * broadcast to every client.
 */

export type PersonaId =
  | "mentor"
  | "cheerleader"
  | "critic"
  | "designer"
  | "analyst"
  | "ceo"
  | "friend"
  | "no_persona";

export const CYCLE_VALUES = ["off", "30s", "3m", "5m"] as const;
export type CycleValue = (typeof CYCLE_VALUES)[number];

export interface SettingsSnapshot {
  persona: PersonaId;
  "capture.mode": "whole_screen" | "active_window" | "cursor_region";
  "capture.cursor_region": string;
  "cycle.voice": CycleValue;
  "cycle.emoji": CycleValue;
  memory_depth: number;
  "hotkeys.feedback": string;
  "hotkeys.emoji": string;
}

export interface PersonaInfo {
  id: PersonaId;
  display_name: string;
  axis: Record<string, string>;
  voice: { id: string; description: string };
  icon_ref: string;
}

export interface CommandReply {
  reply_to: string | null;
  ok: boolean;
  result?: Record<string, unknown>;
  error?: string;
}

export interface GenerationStarted {
  event: "GenerationStarted";
  kind: "feedback" | "emoji";
  persona: PersonaId;
}

export interface FeedbackReady {
  event: "FeedbackReady";
  event_id: string;
  persona: PersonaId;
  text: string;
  audio_duration: number;
}

export interface EmojiReady {
  event: "EmojiReady";
  emojis: string[];
}

export interface GenerationFailed {
  event: "GenerationFailed";
  status: string;
  error_kind?: string;
  silent: boolean;
  message?: string;
}

export interface PlaybackFinished {
  event: "PlaybackFinished";
  event_id: string;
}

export interface SettingsChanged {
  event: "SettingsChanged";
  settings: SettingsSnapshot;
}

export type DaemonEvent =
  | GenerationStarted
  | FeedbackReady
  | EmojiReady
  | GenerationFailed
  | PlaybackFinished
  | SettingsChanged;

export function isDaemonEvent(msg: unknown): msg is DaemonEvent {
  return typeof msg === "object" && msg !== null && "event" in msg;
}

export function isReply(msg: unknown): msg is CommandReply {
  return typeof msg === "object" && msg !== null && "reply_to" in msg;
}
