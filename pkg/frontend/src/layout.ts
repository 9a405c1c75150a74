/** Deterministic force-directed layout.
 *
 * A pure function of the (sorted) node set, edge set, seed, and canvas
 * size: no Math.random, no time, no iteration-order dependence, so the
 * same graph always lands on the same pixels and snapshot tests are
 * stable across runs and machines.
 */

export interface LayoutOptions {
  width: number;
  height: number;
  seed: number;
  iterations?: number;
  springLength?: number;
}

export interface Point {
  x: number;
  y: number;
}

/** Small fast PRNG with full 32-bit state, good enough for jitter. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function runLayout(
  nodeIds: Iterable<string>,
  edges: Iterable<[string, string]>,
  opts: LayoutOptions,
): Map<string, Point> {
  const ids = [...nodeIds].sort();
  const index = new Map(ids.map((id, i) => [id, i]));
  const n = ids.length;
  const result = new Map<string, Point>();
  if (n === 0) {
    return result;
  }

  const { width, height, seed } = opts;
  const iterations = opts.iterations ?? 150;
  const spring = opts.springLength ?? Math.min(width, height) / 5;
  const rand = mulberry32(seed);
  const cx = width / 2;
  const cy = height / 2;

  // seeded start: a circle with jitter breaks symmetry reproducibly
  const radius = Math.min(width, height) / 3;
  const xs = new Float64Array(n);
  const ys = new Float64Array(n);
  const vxs = new Float64Array(n);
  const vys = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const angle = (2 * Math.PI * i) / n;
    xs[i] = cx + radius * Math.cos(angle) + (rand() - 0.5) * 10;
    ys[i] = cy + radius * Math.sin(angle) + (rand() - 0.5) * 10;
  }

  const links: Array<[number, number]> = [];
  for (const [a, b] of [...edges].sort((p, q) =>
    p[0] === q[0] ? (p[1] < q[1] ? -1 : 1) : p[0] < q[0] ? -1 : 1,
  )) {
    const ia = index.get(a);
    const ib = index.get(b);
    if (ia !== undefined && ib !== undefined && ia !== ib) {
      links.push([ia, ib]);
    }
  }

  const repulsion = spring * spring;
  for (let step = 0; step < iterations; step++) {
    const cooling = 1 - step / iterations;
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let dx = xs[i] - xs[j];
        let dy = ys[i] - ys[j];
        let d2 = dx * dx + dy * dy;
        if (d2 < 0.01) {
          // coincident nodes push apart along a seed-stable direction
          dx = ((i + 1) % 7) - 3 || 1;
          dy = ((j + 1) % 5) - 2 || 1;
          d2 = dx * dx + dy * dy;
        }
        const force = repulsion / d2;
        const d = Math.sqrt(d2);
        const fx = (dx / d) * force;
        const fy = (dy / d) * force;
        vxs[i] += fx;
        vys[i] += fy;
        vxs[j] -= fx;
        vys[j] -= fy;
      }
    }
    for (const [ia, ib] of links) {
      const dx = xs[ib] - xs[ia];
      const dy = ys[ib] - ys[ia];
      const d = Math.sqrt(dx * dx + dy * dy) || 1;
      const force = (d - spring) * 0.08;
      const fx = (dx / d) * force;
      const fy = (dy / d) * force;
      vxs[ia] += fx;
      vys[ia] += fy;
      vxs[ib] -= fx;
      vys[ib] -= fy;
    }
    for (let i = 0; i < n; i++) {
      vxs[i] += (cx - xs[i]) * 0.01;
      vys[i] += (cy - ys[i]) * 0.01;
      xs[i] += vxs[i] * 0.1 * cooling;
      ys[i] += vys[i] * 0.1 * cooling;
      vxs[i] *= 0.6;
      vys[i] *= 0.6;
      const margin = 16;
      xs[i] = Math.min(width - margin, Math.max(margin, xs[i]));
      ys[i] = Math.min(height - margin, Math.max(margin, ys[i]));
    }
  }

  for (let i = 0; i < n; i++) {
    result.set(ids[i], { x: Math.round(xs[i] * 100) / 100, y: Math.round(ys[i] * 100) / 100 });
  }
  return result;
}
