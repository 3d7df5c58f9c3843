/**
 * Forward kinematics for skeleton rendering, mirroring the server's
 * modified Denavit-Hartenberg convention: per joint the fixed link
 * transform Rx(alpha) * Tx(a), then the joint motion Rz(q + offset) *
 * Tz(d); an optional tool translation ends the chain, and the first
 * joint sits base_height above the world origin.
 */
import type { ChainDefinition } from "./protocol.js";

export type Vec3 = [number, number, number];

/** Row-major 4x4 matrix. */
type Mat4 = number[];

function multiply(a: Mat4, b: Mat4): Mat4 {
  const out = new Array<number>(16).fill(0);
  for (let i = 0; i < 4; i++) {
    for (let j = 0; j < 4; j++) {
      let sum = 0;
      for (let k = 0; k < 4; k++) {
        sum += a[i * 4 + k] * b[k * 4 + j];
      }
      out[i * 4 + j] = sum;
    }
  }
  return out;
}

function rotX(angle: number): Mat4 {
  const c = Math.cos(angle);
  const s = Math.sin(angle);
  return [1, 0, 0, 0, 0, c, -s, 0, 0, s, c, 0, 0, 0, 0, 1];
}

function rotZ(angle: number): Mat4 {
  const c = Math.cos(angle);
  const s = Math.sin(angle);
  return [c, -s, 0, 0, s, c, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1];
}

function translate(x: number, y: number, z: number): Mat4 {
  return [1, 0, 0, x, 0, 1, 0, y, 0, 0, 1, z, 0, 0, 0, 1];
}

function column3(m: Mat4): Vec3 {
  return [m[3], m[7], m[11]];
}

function apply(m: Mat4, p: Vec3): Vec3 {
  return [
    m[0] * p[0] + m[1] * p[1] + m[2] * p[2] + m[3],
    m[4] * p[0] + m[5] * p[1] + m[6] * p[2] + m[7],
    m[8] * p[0] + m[9] * p[1] + m[10] * p[2] + m[11],
  ];
}

/**
 * World positions of the skeleton polyline: base foot, each joint
 * origin, and finally the tool tip (n_joints + 2 points).
 */
export function skeletonPoints(chain: ChainDefinition, q: number[]): Vec3[] {
  if (q.length !== chain.joints.length) {
    throw new Error(
      `expected ${chain.joints.length} joint angles, got ${q.length}`,
    );
  }
  let T = translate(0, 0, chain.base_height_m);
  const points: Vec3[] = [[0, 0, 0]];
  chain.joints.forEach((joint, i) => {
    T = multiply(T, multiply(rotX(joint.alpha_rad), translate(joint.a_m, 0, 0)));
    points.push(column3(T));
    T = multiply(
      T,
      multiply(rotZ(q[i] + joint.theta_offset_rad), translate(0, 0, joint.d_m)),
    );
  });
  const tool = chain.tool_offset_m as Vec3;
  points.push(apply(T, tool));
  return points;
}

/** End-effector world position (the last skeleton point). */
export function toolPosition(chain: ChainDefinition, q: number[]): Vec3 {
  const points = skeletonPoints(chain, q);
  return points[points.length - 1];
}
