import { describe, expect, it } from "vitest";

import { InputState } from "../src/input.js";

function press(input: InputState, ...codes: string[]) {
  for (const code of codes) input.keyDown(code);
}

describe("keyboard to action mapping", () => {
  it("no keys pressed maps to the zero action", () => {
    const input = new InputState();
    expect(input.action(null)).toEqual([0, 0]);
  });

  it("arrow keys map to the unit action in each axis", () => {
    const input = new InputState();
    press(input, "ArrowLeft", "ArrowUp");
    expect(input.action(null)).toEqual([-1, 1]);
  });

  it("WASD aliases the arrows", () => {
    const input = new InputState();
    press(input, "KeyD", "KeyS");
    expect(input.action(null)).toEqual([1, -1]);
  });

  it("opposing keys cancel", () => {
    const input = new InputState();
    press(input, "ArrowLeft", "ArrowRight", "KeyW", "KeyS");
    expect(input.action(null)).toEqual([0, 0]);
  });

  it("key release stops contributing", () => {
    const input = new InputState();
    press(input, "ArrowRight");
    input.keyUp("ArrowRight");
    expect(input.action(null)).toEqual([0, 0]);
  });

  it("untracked keys are ignored", () => {
    const input = new InputState();
    expect(input.keyDown("KeyQ")).toBe(false);
    expect(input.action(null)).toEqual([0, 0]);
  });

  it("clear releases everything", () => {
    const input = new InputState();
    press(input, "ArrowRight", "ArrowUp");
    input.clear();
    expect(input.action(null)).toEqual([0, 0]);
  });
});

describe("gamepad blending", () => {
  it("gamepad axes pass through with the vertical axis inverted", () => {
    const input = new InputState();
    expect(input.action([0.5, -0.25])).toEqual([0.5, 0.25]);
  });

  it("keyboard plus gamepad sums and clamps to [-1, 1]", () => {
    const input = new InputState();
    press(input, "ArrowRight", "ArrowUp");
    const [u1, u2] = input.action([0.9, -0.9]);
    expect(u1).toBe(1);
    expect(u2).toBe(1);
  });

  it("gamepad never produces values outside [-1, 1]", () => {
    const input = new InputState();
    expect(input.action([5, 5])).toEqual([1, -1]);
  });
});
