/**
 * Overlay state and its reducer. The daemon is the source of truth: the
 * settings mirror only ever updates from SettingsChanged events, so
 * replaying an event stream reproduces the UI state exactly.
 */

import {
  DaemonEvent,
  PersonaInfo,
  SettingsSnapshot,
} from "./protocol.js";

export const TRANSCRIPT_EXTRA_MS = 5_000;
export const EMOJI_FLOAT_MS = 3_000;
export const ERROR_GLYPH_MS = 4_000;
export const TRANSCRIPT_HISTORY_LIMIT = 10;

export interface Transcript {
  eventId: string;
  persona: string;
  text: string;
  expiresAt: number;
}

export interface EmojiAnimation {
  emojis: string[];
  until: number;
}

export interface UiState {
  connection: "connected" | "disconnected";
  settings: SettingsSnapshot | null;
  personas: PersonaInfo[];
  inFlight: boolean;
  transcript: Transcript | null;
  transcriptHistory: Transcript[];
  emoji: EmojiAnimation | null;
  errorUntil: number | null;
  panelOpen: boolean;
}

export function initialState(): UiState {
  return {
    connection: "disconnected",
    settings: null,
    personas: [],
    inFlight: false,
    transcript: null,
    transcriptHistory: [],
    emoji: null,
    errorUntil: null,
    panelOpen: false,
  };
}

/** Apply one daemon event. Pure: returns a new state. */
export function reduce(state: UiState, event: DaemonEvent, now: number): UiState {
  switch (event.event) {
    case "GenerationStarted":
      return { ...state, inFlight: true };
    case "FeedbackReady": {
      const transcript: Transcript = {
        eventId: event.event_id,
        persona: event.persona,
        text: event.text,
        expiresAt: now + (event.audio_duration + TRANSCRIPT_EXTRA_MS / 1000) * 1000,
      };
      const history = [...state.transcriptHistory, transcript].slice(
        -TRANSCRIPT_HISTORY_LIMIT,
      );
      return { ...state, inFlight: false, transcript, transcriptHistory: history };
    }
    case "EmojiReady":
      return {
        ...state,
        inFlight: false,
        emoji: { emojis: event.emojis, until: now + EMOJI_FLOAT_MS },
      };
    case "GenerationFailed":
      return {
        ...state,
        inFlight: false,
        errorUntil: event.silent ? state.errorUntil : now + ERROR_GLYPH_MS,
      };
    case "PlaybackFinished":
      return state;
    case "SettingsChanged":
      return { ...state, settings: event.settings };
  }
}

/** Drop anything whose display window has elapsed. */
export function tick(state: UiState, now: number): UiState {
  let next = state;
  if (next.transcript && now >= next.transcript.expiresAt) {
    next = { ...next, transcript: null };
  }
  if (next.emoji && now >= next.emoji.until) {
    next = { ...next, emoji: null };
  }
  if (next.errorUntil !== null && now >= next.errorUntil) {
    next = { ...next, errorUntil: null };
  }
  return next;
}

export function setConnection(
  state: UiState,
  connection: UiState["connection"],
): UiState {
  return { ...state, connection };
}

export function setPersonas(state: UiState, personas: PersonaInfo[]): UiState {
  return { ...state, personas };
}

export function togglePanel(state: UiState, open?: boolean): UiState {
  return { ...state, panelOpen: open ?? !state.panelOpen };
}
