/**
 * NDJSON unix-socket client for the daemon's control protocol.
 *
 * One JSON object per newline-terminated line. Commands carry a
 * client-chosen request_id; the matching reply echoes it in reply_to.
 * Events (objects with an "event" field) are dispatched to listeners and
 * buffered for waitEvent().
 */

import * as net from "node:net";

import {
  CommandReply,
  DaemonEvent,
  isDaemonEvent,
  isReply,
  PersonaInfo,
  SettingsSnapshot,
} from "./protocol.js";

export class DaemonError extends Error {}

export interface ClientOptions {
  /** Reconnect automatically with exponential backoff (capped). */
  reconnect?: boolean;
  reconnectBaseMs?: number;
  reconnectMaxMs?: number;
}

type EventListener = (event: DaemonEvent) => void;

export function socketPath(explicit?: string): string {
  if (explicit) return explicit;
  if (process.env.QUAC_SOCKET) return process.env.QUAC_SOCKET;
  const runtimeDir = process.env.XDG_RUNTIME_DIR ?? "/tmp";
  const uid = typeof process.getuid === "function" ? process.getuid() : 0;
  return `${runtimeDir}/quac-${uid}.sock`;
}

export class DaemonClient {
  private socket: net.Socket | null = null;
  private buffer = "";
  private nextRequestId = 1;
  private pending = new Map<
    string,
    { resolve: (reply: CommandReply) => void; reject: (err: Error) => void }
  >();
  private eventListeners: EventListener[] = [];
  private eventBacklog: DaemonEvent[] = [];
  private closed = false;
  private reconnectDelay: number;

  constructor(
    private readonly path: string,
    private readonly options: ClientOptions = {},
  ) {
    this.reconnectDelay = options.reconnectBaseMs ?? 250;
  }

  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection(this.path);
      socket.setEncoding("utf8");
      socket.once("connect", () => {
        this.socket = socket;
        this.reconnectDelay = this.options.reconnectBaseMs ?? 250;
        resolve();
      });
      socket.once("error", (err) => {
        if (this.socket !== socket) reject(err);
      });
      socket.on("data", (chunk: string) => this.onData(chunk));
      socket.on("close", () => this.onClose());
    });
  }

  private onClose(): void {
    this.socket = null;
    for (const { reject } of this.pending.values()) {
      reject(new DaemonError("connection closed"));
    }
    this.pending.clear();
    if (this.closed || !this.options.reconnect) return;
    const delay = this.reconnectDelay;
    this.reconnectDelay = Math.min(
      delay * 2,
      this.options.reconnectMaxMs ?? 5_000,
    );
    setTimeout(() => {
      if (!this.closed) this.connect().catch(() => undefined);
    }, delay).unref?.();
  }

  private onData(chunk: string): void {
    this.buffer += chunk;
    let index: number;
    while ((index = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, index);
      this.buffer = this.buffer.slice(index + 1);
      if (!line.trim()) continue;
      let message: unknown;
      try {
        message = JSON.parse(line);
      } catch {
        continue; // tolerate a garbled line rather than killing the client
      }
      if (isReply(message) && message.reply_to !== null) {
        const waiter = this.pending.get(message.reply_to as string);
        if (waiter) {
          this.pending.delete(message.reply_to as string);
          waiter.resolve(message);
          continue;
        }
      }
      if (isDaemonEvent(message)) {
        this.eventBacklog.push(message);
        for (const listener of this.eventListeners) listener(message);
      }
    }
  }

  onEvent(listener: EventListener): () => void {
    this.eventListeners.push(listener);
    return () => {
      this.eventListeners = this.eventListeners.filter((l) => l !== listener);
    };
  }

  /**
   * Resolve with the next event named `name`. Checks events that already
   * arrived (since `sinceBacklogMark`) first, so an event interleaved with
   * a command reply is never lost.
   */
  waitEvent(name: DaemonEvent["event"], timeoutMs = 10_000): Promise<DaemonEvent> {
    const backlogHit = this.takeFromBacklog(name);
    if (backlogHit) return Promise.resolve(backlogHit);
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => {
        off();
        reject(new DaemonError(`timed out waiting for ${name}`));
      }, timeoutMs);
      const off = this.onEvent((event) => {
        if (event.event === name) {
          clearTimeout(timer);
          off();
          this.eventBacklog = this.eventBacklog.filter((e) => e !== event);
          resolve(event);
        }
      });
    });
  }

  private takeFromBacklog(name: DaemonEvent["event"]): DaemonEvent | null {
    const index = this.eventBacklog.findIndex((e) => e.event === name);
    if (index < 0) return null;
    const [event] = this.eventBacklog.splice(index, 1);
    return event;
  }

  /** Drop buffered events (call before a fresh command/wait sequence). */
  clearBacklog(): void {
    this.eventBacklog = [];
  }

  request(
    command: string,
    fields: Record<string, unknown> = {},
  ): Promise<CommandReply> {
    if (!this.socket) {
      return Promise.reject(new DaemonError("not connected"));
    }
    const requestId = `ui-${this.nextRequestId++}`;
    const line = JSON.stringify({ request_id: requestId, command, ...fields });
    return new Promise((resolve, reject) => {
      this.pending.set(requestId, { resolve, reject });
      this.socket!.write(line + "\n");
    });
  }

  async getSettings(): Promise<SettingsSnapshot> {
    const reply = await this.request("get_settings");
    if (!reply.ok) throw new DaemonError(reply.error ?? "get_settings failed");
    return reply.result!.settings as SettingsSnapshot;
  }

  async setSetting(key: string, value: unknown): Promise<CommandReply> {
    return this.request("set_setting", { key, value });
  }

  async listPersonas(): Promise<PersonaInfo[]> {
    const reply = await this.request("list_personas");
    if (!reply.ok) throw new DaemonError(reply.error ?? "list_personas failed");
    return reply.result!.personas as PersonaInfo[];
  }

  close(): void {
    this.closed = true;
    this.socket?.end();
    this.socket?.destroy();
    this.socket = null;
  }
}
