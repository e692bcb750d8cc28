// Session transport: one WebSocket, sequence-numbered joystick inputs
// rate-limited to the display rate, trial control messages passed through.
// Reconnection is explicit (the cockpit shows a prompt) so a dropped
// trial is never silently restarted.

import {
  ProtocolError,
  decodeServerMessage,
  encodeMessage,
  makeAbortTrial,
  makeInput,
  makeStartTrial,
  makeToggleCorrection,
} from "./protocol.js";
import type { Axes, Condition, ServerMessage } from "./protocol.js";
import type { ConnectionStatus } from "./state.js";

export interface WireSocket {
  send(text: string): void;
  close(): void;
}

export interface SocketHooks {
  onOpen(): void;
  onText(text: string): void;
  onClose(): void;
}

export type SocketFactory = (url: string, hooks: SocketHooks) => WireSocket;

export interface SessionClient {
  connect(): void;
  close(): void;
  connected(): boolean;
  sendInput(axes: Axes): boolean; // false when throttled or offline
  startTrial(condition: Condition): void;
  toggleCorrection(): void;
  abortTrial(): void;
}

export function createSessionClient(options: {
  url: string;
  factory: SocketFactory;
  onMessage: (message: ServerMessage) => void;
  onDecodeError?: (reason: string) => void;
  onStatus?: (status: ConnectionStatus) => void;
  maxInputHz?: number;
  now?: () => number;
}): SessionClient {
  const now = options.now ?? (() => Date.now());
  const minIntervalMs = 1000 / (options.maxInputHz ?? 60);
  let socket: WireSocket | null = null;
  let open = false;
  let seq = 0;
  let lastInputAt = -Infinity;
  let generation = 0; // hooks from a superseded socket are ignored

  const sendRaw = (message: object): boolean => {
    if (!open || !socket) return false;
    socket.send(encodeMessage(message));
    return true;
  };

  return {
    connect() {
      generation += 1;
      const mine = generation;
      open = false;
      options.onStatus?.("connecting");
      socket = options.factory(options.url, {
        onOpen: () => {
          if (mine !== generation) return;
          open = true;
          options.onStatus?.("open");
        },
        onText: (text) => {
          if (mine !== generation) return;
          let message: ServerMessage;
          try {
            message = decodeServerMessage(text);
          } catch (error) {
            if (error instanceof ProtocolError) {
              options.onDecodeError?.(error.message);
              return;
            }
            throw error;
          }
          options.onMessage(message);
        },
        onClose: () => {
          if (mine !== generation) return;
          open = false;
          socket = null;
          options.onStatus?.("closed");
        },
      });
    },
    close() {
      generation += 1;
      socket?.close();
      socket = null;
      open = false;
    },
    connected: () => open,
    sendInput(axes) {
      const t = now();
      if (t - lastInputAt < minIntervalMs) return false;
      if (!sendRaw(makeInput(seq, axes))) return false;
      seq += 1;
      lastInputAt = t;
      return true;
    },
    startTrial(condition) {
      sendRaw(makeStartTrial(condition));
    },
    toggleCorrection() {
      sendRaw(makeToggleCorrection());
    },
    abortTrial() {
      sendRaw(makeAbortTrial());
    },
  };
}

export const browserSocketFactory: SocketFactory = (url, hooks) => {
  const ws = new WebSocket(url);
  ws.onopen = () => hooks.onOpen();
  ws.onmessage = (event) => hooks.onText(String(event.data));
  ws.onclose = () => hooks.onClose();
  return {
    send: (text) => ws.send(text),
    close: () => ws.close(),
  };
};
