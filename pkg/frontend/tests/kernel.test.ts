import { describe, expect, it } from "vitest";

import { eesTruncate, sampleStep } from "../src/index.js";

describe("eesTruncate", () => {
  it("keeps the whole vocabulary for flat logits", () => {
    const result = eesTruncate(new Float64Array(12), 1.0);
    expect(result.kStar).toBe(12);
    expect(Array.from(result.candidateIds)).toEqual([...Array(12).keys()]);
    expect(result.mass).toBeCloseTo(1, 12);
    expect(result.normEntropy).toBeCloseTo(1, 12);
  });

  it("keeps exactly the live token when the rest is masked", () => {
    const logits = new Float64Array(9).fill(-Infinity);
    logits[5] = 0.25;
    const result = eesTruncate(logits, 0.8);
    expect(result.kStar).toBe(1);
    expect(result.candidateIds[0]).toBe(5);
    expect(result.probs[0]).toBe(1);
  });

  it("resolves the worked three-token example", () => {
    // softmax of ln([0.5, 0.3, 0.2]) at tau=1 recovers the probabilities;
    // the equilibrium break happens at k=3, keeping two tokens.
    const logits = [Math.log(0.5), Math.log(0.3), Math.log(0.2)];
    const result = eesTruncate(logits, 1.0);
    expect(result.kStar).toBe(2);
    expect(Array.from(result.candidateIds)).toEqual([0, 1]);
    expect(result.mass).toBeCloseTo(0.8, 12);
    expect(result.probs[0]).toBeCloseTo(0.625, 12);
  });

  it("renormalized probabilities sum to one", () => {
    const logits = [2.0, 1.0, 0.5, 0.0, -1.0, -Infinity];
    const result = eesTruncate(logits, 1.2);
    const total = result.probs.reduce((acc, p) => acc + p, 0);
    expect(total).toBeCloseTo(1, 12);
    expect(result.kStar).toBe(result.probs.length);
  });

  it("accepts Float32Array input", () => {
    const result = eesTruncate(new Float32Array([1.0, 1.0, 1.0]), 1.0);
    expect(result.kStar).toBe(3);
  });

  it("rejects invalid input", () => {
    expect(() => eesTruncate([1, 2], 0)).toThrow(RangeError);
    expect(() => eesTruncate([1, 2], -1)).toThrow(RangeError);
    expect(() => eesTruncate([1, Number.NaN], 1)).toThrow(RangeError);
    expect(() => eesTruncate([1, Infinity], 1)).toThrow(RangeError);
    expect(() => eesTruncate([-Infinity, -Infinity], 1)).toThrow(RangeError);
    expect(() => eesTruncate([], 1)).toThrow(RangeError);
  });
});

describe("sampleStep", () => {
  it("always returns the argmax when a single token survives", () => {
    const logits = [-Infinity, 3.5, -Infinity, -Infinity];
    for (const seed of [0n, 1n, 42n, 2n ** 63n]) {
      expect(sampleStep(logits, 1.0, seed, 0)).toBe(1);
    }
  });

  it("is deterministic in (seed, stepIndex)", () => {
    const logits = [0.3, 0.1, -0.2, 0.9, 0.0];
    const first = sampleStep(logits, 1.0, 99n, 3);
    expect(sampleStep(logits, 1.0, 99n, 3)).toBe(first);
  });

  it("moves with the stream position", () => {
    const logits = new Float64Array(64); // flat: all 64 tokens survive
    const seen = new Set<number>();
    for (let step = 0; step < 16; step++) {
      seen.add(sampleStep(logits, 1.0, 7n, step));
    }
    expect(seen.size).toBeGreaterThan(1);
  });

  it("never leaves the candidate set", () => {
    const logits = [4.0, 3.0, -5.0, -6.0, -7.0];
    const { kStar, candidateIds } = eesTruncate(logits, 1.0);
    const allowed = new Set(Array.from(candidateIds));
    for (let step = 0; step < 200; step++) {
      const token = sampleStep(logits, 1.0, 5n, step);
      expect(allowed.has(token)).toBe(true);
    }
    expect(kStar).toBeLessThan(logits.length);
  });
});
