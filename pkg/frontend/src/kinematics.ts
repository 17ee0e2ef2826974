// Client-side planar forward kinematics, drawing use only.
//
// Convention (matching the server): the chain is rooted at the ankle at
// the origin of the x-z plane, x forward and z up; joint angles are
// relative and positive counter-clockwise; all-zero angles point the
// chain straight up, so link direction is (-sin(theta), cos(theta)) with
// theta the cumulative angle. The server also streams its own frame
// positions, which callers can use to cross-check this implementation.

export type Point = [number, number];

export function forwardFrames(lengths: number[], q: number[]): Point[] {
  if (lengths.length !== q.length) {
    throw new Error(
      `joint count mismatch: ${lengths.length} links vs ${q.length} angles`,
    );
  }
  const frames: Point[] = [[0, 0]];
  let theta = 0;
  let x = 0;
  let z = 0;
  for (let i = 0; i < lengths.length; i++) {
    theta += q[i];
    x += -lengths[i] * Math.sin(theta);
    z += lengths[i] * Math.cos(theta);
    frames.push([x, z]);
  }
  return frames;
}

export function maxFrameDeviation(a: Point[], b: Point[]): number {
  if (a.length !== b.length) {
    return Infinity;
  }
  let worst = 0;
  for (let i = 0; i < a.length; i++) {
    worst = Math.max(worst, Math.abs(a[i][0] - b[i][0]), Math.abs(a[i][1] - b[i][1]));
  }
  return worst;
}
