/**
 * Keyboard and gamepad state mapped to the normalized evader action.
 *
 * Arrow keys / WASD set the acceleration axes to ±1; opposing keys cancel.
 * Analog gamepad axes pass straight through (with the screen-down y axis
 * flipped to world-up). The result is always inside [-1, 1]².
 */

export type ActionPair = [number, number];

const LEFT_KEYS = new Set(["ArrowLeft", "KeyA"]);
const RIGHT_KEYS = new Set(["ArrowRight", "KeyD"]);
const UP_KEYS = new Set(["ArrowUp", "KeyW"]);
const DOWN_KEYS = new Set(["ArrowDown", "KeyS"]);

const TRACKED = new Set([...LEFT_KEYS, ...RIGHT_KEYS, ...UP_KEYS, ...DOWN_KEYS]);

const clamp = (v: number) => Math.max(-1, Math.min(1, v));

export class InputState {
  private pressed = new Set<string>();

  /** @returns true when the key is one the arena consumes. */
  keyDown(code: string): boolean {
    if (!TRACKED.has(code)) return false;
    this.pressed.add(code);
    return true;
  }

  keyUp(code: string): void {
    this.pressed.delete(code);
  }

  /** Drop all held keys (window blur, session reset). */
  clear(): void {
    this.pressed.clear();
  }

  private axis(negative: Set<string>, positive: Set<string>): number {
    let v = 0;
    for (const code of this.pressed) {
      if (negative.has(code)) v -= 1;
      if (positive.has(code)) v += 1;
    }
    return clamp(v);
  }

  /**
   * Current action. Gamepad axes (screen coordinates: y grows downward)
   * are added on top of the key state, then clamped.
   */
  action(gamepadAxes: ActionPair | null = null): ActionPair {
    let u1 = this.axis(LEFT_KEYS, RIGHT_KEYS);
    let u2 = this.axis(DOWN_KEYS, UP_KEYS);
    if (gamepadAxes) {
      u1 += gamepadAxes[0];
      u2 -= gamepadAxes[1]; // stick down = world down
    }
    return [clamp(u1), clamp(u2)];
  }
}
