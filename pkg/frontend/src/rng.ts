/**
 * SplitMix64: the deterministic 64-bit generator behind every sampling draw.
 *
 * The state advances by a fixed odd constant and each output is an
 * avalanching mix of the new state, so draw i of the stream seeded with s is
 * simply mix64(s + (i+1) * GOLDEN_GAMMA), so any stream position can be
 * addressed directly without replaying the ones before it. Uniform doubles
 * take the top 53 bits: (x >> 11) * 2^-53, giving [0, 1).
 *
 * Matches the Python engine bit-for-bit; reference first outputs for seed 0
 * and seed 1234567 are frozen in the tests.
 */

const MASK64 = (1n << 64n) - 1n;
export const GOLDEN_GAMMA = 0x9e3779b97f4a7c15n;

const TO_UNIT = 2 ** -53;

/** Output stage: two xor-shift-multiply rounds and a final shift. */
export function mix64(z: bigint): bigint {
  z &= MASK64;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return z ^ (z >> 31n);
}

export type SeedLike = bigint | number | string;

export function toSeed(seed: SeedLike): bigint {
  const value = typeof seed === "bigint" ? seed : BigInt(seed);
  if (value < 0n || value > MASK64) {
    throw new RangeError(`seed must be an unsigned 64-bit integer, got ${value}`);
  }
  return value;
}

/** The index-th (0-based) raw output of the stream started at `seed`. */
export function uint64At(seed: SeedLike, index: number): bigint {
  if (!Number.isInteger(index) || index < 0) {
    throw new RangeError(`index must be a non-negative integer, got ${index}`);
  }
  return mix64((toSeed(seed) + (BigInt(index) + 1n) * GOLDEN_GAMMA) & MASK64);
}

/** The index-th uniform double in [0, 1) of the stream started at `seed`. */
export function uniformAt(seed: SeedLike, index: number): number {
  return Number(uint64At(seed, index) >> 11n) * TO_UNIT;
}
