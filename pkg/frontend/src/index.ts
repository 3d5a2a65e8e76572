/**
 * Per-step truncation and sampling kernel over plain float buffers.
 *
 * A host inference loop hands in the raw logits for one step and gets back
 * either the kept candidate set (`eesTruncate`) or the sampled token id
 * (`sampleStep`). The call is stateless: determinism comes from the
 * (seed, stepIndex) pair, one uniform draw per step.
 *
 * The selection rule keeps the largest prefix of the probability-sorted
 * vocabulary whose normalized entropy (subset Shannon entropy over its
 * maximum ln k) still covers its cumulative probability mass, carrying the
 * entropy forward with an O(1) incremental update per candidate. There is no
 * tunable parameter besides the softmax temperature.
 */

import { SeedLike, uniformAt } from "./rng.js";

export { GOLDEN_GAMMA, mix64, uint64At, uniformAt } from "./rng.js";
export type { SeedLike } from "./rng.js";

/** Slack for the entropy-vs-mass comparison; keeps exact-uniform inputs whole. */
export const EQUILIBRIUM_SLACK = 1e-12;

/** Accepted input buffers. Float32 logits are widened to f64 on entry. */
export type LogitBuffer = Float64Array | Float32Array | number[];

/** Result of truncating one step's distribution. */
export interface TruncationResult {
  /** Number of tokens kept. */
  kStar: number;
  /** Kept token ids, most probable first. */
  candidateIds: Int32Array;
  /** Probabilities of the kept tokens renormalized to sum 1, same order. */
  probs: Float64Array;
  /** Cumulative raw probability of the kept tokens (clamped to <= 1). */
  mass: number;
  /** Subset entropy over ln(kStar); 1 when a single token is kept. */
  normEntropy: number;
}

interface SortedDistribution {
  probs: Float64Array;
  tokenIds: Int32Array;
}

function validateTau(tau: number): void {
  if (!(tau > 0) || !Number.isFinite(tau)) {
    throw new RangeError(`temperature must be a positive finite number, got ${tau}`);
  }
}

/** Temperature softmax with max-subtraction; -Infinity marks masked tokens. */
function softmax(logits: LogitBuffer, tau: number): Float64Array {
  const n = logits.length;
  if (n === 0) {
    throw new RangeError("logits must be non-empty");
  }
  let max = -Infinity;
  for (let i = 0; i < n; i++) {
    const value = logits[i];
    if (Number.isNaN(value) || value === Infinity) {
      throw new RangeError(`logits must be finite or -Infinity, got ${value} at ${i}`);
    }
    if (value > max) max = value;
  }
  if (max === -Infinity) {
    throw new RangeError("all logits are masked (-Infinity)");
  }
  const out = new Float64Array(n);
  let total = 0;
  for (let i = 0; i < n; i++) {
    const weight = Math.exp((logits[i] - max) / tau);
    out[i] = weight;
    total += weight;
  }
  for (let i = 0; i < n; i++) {
    out[i] /= total;
  }
  return out;
}

/** Descending sort with ties broken by ascending token id; zeros dropped. */
function sortDescending(probs: Float64Array): SortedDistribution {
  const order: number[] = [];
  for (let i = 0; i < probs.length; i++) {
    if (probs[i] > 0) order.push(i);
  }
  order.sort((a, b) => probs[b] - probs[a] || a - b);
  const sorted = new Float64Array(order.length);
  const ids = new Int32Array(order.length);
  for (let i = 0; i < order.length; i++) {
    sorted[i] = probs[order[i]];
    ids[i] = order[i];
  }
  return { probs: sorted, tokenIds: ids };
}

/**
 * Incremental threshold scan: stop at the first candidate size where the
 * normalized subset entropy falls below the cumulative mass.
 */
function selectThreshold(probs: Float64Array): { kStar: number; mass: number; normEntropy: number } {
  const n = probs.length;
  let mass = probs[0];
  let entropy = 0;
  let massC = Math.min(mass, 1);
  let normC = 1;
  let kStar = n;
  let finalMass = massC;
  let finalNorm = normC;
  for (let k = 2; k <= n; k++) {
    const prevMassC = massC;
    const prevNormC = normC;
    const pNext = probs[k - 1];
    const newMass = mass + pNext;
    const ratio = mass / newMass;
    const share = pNext / newMass;
    entropy = ratio * entropy + ratio * Math.log(newMass / mass) - share * Math.log(share);
    mass = newMass;
    massC = Math.min(mass, 1);
    normC = Math.min(Math.max(entropy / Math.log(k), 0), 1);
    if (normC - massC < -EQUILIBRIUM_SLACK) {
      kStar = k - 1;
      finalMass = prevMassC;
      finalNorm = prevNormC;
      break;
    }
    finalMass = massC;
    finalNorm = normC;
  }
  return { kStar, mass: finalMass, normEntropy: finalNorm };
}

/**
 * Truncate one step's logits to the entropy-mass equilibrium candidate set.
 *
 * @param logits raw model scores for the full vocabulary; -Infinity = masked
 * @param tau    softmax temperature (> 0)
 */
export function eesTruncate(logits: LogitBuffer, tau: number): TruncationResult {
  validateTau(tau);
  const dist = sortDescending(softmax(logits, tau));
  const { kStar, mass, normEntropy } = selectThreshold(dist.probs);
  let total = 0;
  for (let i = 0; i < kStar; i++) total += dist.probs[i];
  const renormalized = new Float64Array(kStar);
  for (let i = 0; i < kStar; i++) renormalized[i] = dist.probs[i] / total;
  return {
    kStar,
    candidateIds: dist.tokenIds.slice(0, kStar),
    probs: renormalized,
    mass,
    normEntropy,
  };
}

/**
 * Truncate and sample one token. Deterministic in (seed, stepIndex): the
 * draw is the stepIndex-th uniform of the seed's stream, so a host loop that
 * calls this once per generated token reproduces a recorded session exactly.
 */
export function sampleStep(
  logits: LogitBuffer,
  tau: number,
  seed: SeedLike,
  stepIndex: number,
): number {
  validateTau(tau);
  const dist = sortDescending(softmax(logits, tau));
  const { kStar } = selectThreshold(dist.probs);
  const u = uniformAt(seed, stepIndex);
  // Inverse CDF over the unnormalized prefix: scale the draw by the running
  // mass instead of renormalizing every weight.
  let total = 0;
  const cumulative = new Float64Array(kStar);
  for (let i = 0; i < kStar; i++) {
    total += dist.probs[i];
    cumulative[i] = total;
  }
  const target = u * total;
  let position = kStar - 1;
  for (let i = 0; i < kStar; i++) {
    if (cumulative[i] > target) {
      position = i;
      break;
    }
  }
  return dist.tokenIds[position];
}
