// Axis capture: keyboard pairs give binary, saturating input; gamepad
// sticks are the analog path. A connected pad wins, otherwise keys,
// otherwise zeros. All axes land in [-1, 1].

import type { Axes } from "./protocol.js";

export interface KeyBindings {
  lateral: [string, string]; // [negative, positive] KeyboardEvent.code
  vertical: [string, string];
  depth: [string, string];
}

export const DEFAULT_BINDINGS: KeyBindings = {
  lateral: ["KeyA", "KeyD"],
  vertical: ["KeyS", "KeyW"],
  depth: ["ArrowDown", "ArrowUp"],
};

export interface GamepadLike {
  connected: boolean;
  axes: readonly number[];
}

type KeyListener = (event: { code: string }) => void;

export interface KeyEventTarget {
  addEventListener(type: string, listener: KeyListener): void;
  removeEventListener(type: string, listener: KeyListener): void;
}

export interface InputSource {
  attach(): void;
  detach(): void;
  axes(): Axes;
  device(): "keyboard" | "gamepad";
}

const clamp = (value: number): number => Math.min(1, Math.max(-1, value));

const defaultGamepads = (): (GamepadLike | null)[] =>
  typeof navigator !== "undefined" && navigator.getGamepads
    ? Array.from(navigator.getGamepads())
    : [];

export function createInputSource(
  options: {
    bindings?: KeyBindings;
    target?: KeyEventTarget;
    getGamepads?: () => (GamepadLike | null)[];
    deadzone?: number;
  } = {},
): InputSource {
  const bindings = options.bindings ?? DEFAULT_BINDINGS;
  const target = options.target ?? (typeof window !== "undefined" ? window : undefined);
  const getGamepads = options.getGamepads ?? defaultGamepads;
  const deadzone = options.deadzone ?? 0.15;
  const keyDown: Record<string, boolean> = {};

  const onKeyDown: KeyListener = (event) => {
    keyDown[event.code] = true;
  };
  const onKeyUp: KeyListener = (event) => {
    keyDown[event.code] = false;
  };

  const axisFromPair = ([negative, positive]: [string, string]): number =>
    (keyDown[positive] ? 1 : 0) - (keyDown[negative] ? 1 : 0);

  const keyboardAxes = (): Axes => [
    axisFromPair(bindings.lateral),
    axisFromPair(bindings.vertical),
    axisFromPair(bindings.depth),
  ];

  const readStick = (pad: GamepadLike, index: number): number => {
    const value = pad.axes[index] ?? 0;
    return Math.abs(value) < deadzone ? 0 : clamp(value);
  };

  // stick up reads negative on the wire; flip so up is positive like the
  // key pairs (left stick steers, right stick vertical is depth), keeping
  // zero positive so released sticks compare clean
  const flip = (value: number): number => (value === 0 ? 0 : -value);
  const gamepadAxes = (pad: GamepadLike): Axes => [
    readStick(pad, 0),
    flip(readStick(pad, 1)),
    flip(readStick(pad, 3)),
  ];

  const firstPad = (): GamepadLike | null => {
    for (const pad of getGamepads()) {
      if (pad && pad.connected) return pad;
    }
    return null;
  };

  return {
    attach() {
      target?.addEventListener("keydown", onKeyDown);
      target?.addEventListener("keyup", onKeyUp);
    },
    detach() {
      target?.removeEventListener("keydown", onKeyDown);
      target?.removeEventListener("keyup", onKeyUp);
    },
    device() {
      return firstPad() ? "gamepad" : "keyboard";
    },
    axes() {
      const pad = firstPad();
      return pad ? gamepadAxes(pad) : keyboardAxes();
    },
  };
}
