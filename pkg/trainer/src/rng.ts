// Deterministic PRNG shared with the verifier: xoshiro256** seeded via
// splitmix64. All integer arithmetic is modulo 2^64 (BigInt); uniform
// doubles use the 53-bit path, so streams match the verifier bit-for-bit
// for the same seed.

const MASK64 = (1n << 64n) - 1n;
const GOLDEN = 0x9e3779b97f4a7c15n;

function splitmix64(state: bigint): [bigint, bigint] {
  state = (state + GOLDEN) & MASK64;
  let z = state;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return [state, (z ^ (z >> 31n)) & MASK64];
}

function rotl(x: bigint, k: bigint): bigint {
  return ((x << k) | (x >> (64n - k))) & MASK64;
}

export class Xoshiro256StarStar {
  private s: [bigint, bigint, bigint, bigint];

  constructor(seed: number | bigint) {
    let state = BigInt(seed) & MASK64;
    const words: bigint[] = [];
    for (let i = 0; i < 4; i++) {
      const [next, word] = splitmix64(state);
      state = next;
      words.push(word);
    }
    this.s = [words[0], words[1], words[2], words[3]];
  }

  nextU64(): bigint {
    const s = this.s;
    const result = (rotl((s[1] * 5n) & MASK64, 7n) * 9n) & MASK64;
    const t = (s[1] << 17n) & MASK64;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45n);
    return result;
  }

  /** Unbiased integer in [0, n). */
  below(n: number): number {
    if (n <= 0) throw new Error("below() requires n >= 1");
    const bigN = BigInt(n);
    const limit = (1n << 64n) - ((1n << 64n) % bigN);
    for (;;) {
      const r = this.nextU64();
      if (r < limit) return Number(r % bigN);
    }
  }

  /** Uniform double in [lo, hi) with 53 random bits. */
  uniform(lo = 0.0, hi = 1.0): number {
    const u = Number(this.nextU64() >> 11n) * 2 ** -53;
    return lo + (hi - lo) * u;
  }
}
