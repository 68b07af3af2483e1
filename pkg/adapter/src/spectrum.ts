/**
 * One-sided power spectrum and banded energies.
 *
 * Power-of-two lengths take the radix-2 FFT; anything else falls back to a
 * direct DFT, which is fine at keyword-clip sizes but O(n^2).
 */

export function powerSpectrum(samples: ArrayLike<number>): Float64Array {
  const n = samples.length;
  if (n < 1) throw new Error("empty signal");
  const re = new Float64Array(n);
  const im = new Float64Array(n);
  for (let i = 0; i < n; i++) re[i] = Number(samples[i]);
  if ((n & (n - 1)) === 0) {
    fftInPlace(re, im);
  } else {
    directDft(re, im);
  }
  const half = Math.floor(n / 2);
  const power = new Float64Array(half + 1);
  for (let k = 0; k <= half; k++) {
    power[k] = re[k]! * re[k]! + im[k]! * im[k]!;
  }
  return power;
}

/**
 * Weighted spectral energy per band. Band i covers [edges[i], edges[i+1])
 * in Hz, except the last band which is closed at its top edge, and ties in
 * any later argmax go to the lowest index by construction.
 */
export function bandEnergies(
  samples: ArrayLike<number>,
  sampleRate: number,
  edges: number[],
  weights: number[],
): number[] {
  const power = powerSpectrum(samples);
  const n = samples.length;
  const nBands = edges.length - 1;
  const energies = new Array<number>(nBands).fill(0);
  for (let k = 0; k < power.length; k++) {
    const freq = (k * sampleRate) / n;
    for (let i = 0; i < nBands; i++) {
      const lo = edges[i]!;
      const hi = edges[i + 1]!;
      const inBand = i === nBands - 1 ? freq >= lo && freq <= hi : freq >= lo && freq < hi;
      if (inBand) {
        energies[i]! += power[k]!;
        break;
      }
    }
  }
  for (let i = 0; i < nBands; i++) energies[i]! *= weights[i]!;
  return energies;
}

function fftInPlace(re: Float64Array, im: Float64Array): void {
  const n = re.length;
  for (let i = 1, j = 0; i < n; i++) {
    let bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      [re[i], re[j]] = [re[j]!, re[i]!];
      [im[i], im[j]] = [im[j]!, im[i]!];
    }
  }
  for (let len = 2; len <= n; len <<= 1) {
    const angle = (-2 * Math.PI) / len;
    for (let start = 0; start < n; start += len) {
      for (let k = 0; k < len / 2; k++) {
        const wr = Math.cos(angle * k);
        const wi = Math.sin(angle * k);
        const a = start + k;
        const b = start + k + len / 2;
        const tr = re[b]! * wr - im[b]! * wi;
        const ti = re[b]! * wi + im[b]! * wr;
        re[b] = re[a]! - tr;
        im[b] = im[a]! - ti;
        re[a] = re[a]! + tr;
        im[a] = im[a]! + ti;
      }
    }
  }
}

function directDft(re: Float64Array, im: Float64Array): void {
  const n = re.length;
  const outRe = new Float64Array(n);
  const outIm = new Float64Array(n);
  for (let k = 0; k < n; k++) {
    let sumRe = 0;
    let sumIm = 0;
    for (let t = 0; t < n; t++) {
      const angle = (-2 * Math.PI * k * t) / n;
      sumRe += re[t]! * Math.cos(angle);
      sumIm += re[t]! * Math.sin(angle);
    }
    outRe[k] = sumRe;
    outIm[k] = sumIm;
  }
  re.set(outRe);
  im.set(outIm);
}
