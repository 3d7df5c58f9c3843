/**
 * Message schemas for the live-session WebSocket and the /model/info
 * endpoint.  Every outgoing message is built through a helper here and
 * validated before it leaves the client, so the UI can only ever send
 * schema-valid messages.
 */
import { z } from "zod";

// -- client -> server -------------------------------------------------------

export const helloMessage = z.object({
  type: z.literal("hello"),
  effector: z.enum(["knob", "hand"]),
});

export const pointMessage = z.object({
  type: z.literal("point"),
  t_ms: z.number().finite().nonnegative(),
  u: z.number().min(0).max(1),
  v: z.number().min(0).max(1),
});

export const endMessage = z.object({
  type: z.literal("end"),
});

export const graspCycleMessage = z.object({
  type: z.literal("grasp_cycle"),
  amplitude: z.number().gt(0).max(0.2),
  period_ms: z.number().min(40),
  cycles: z.number().int().min(1),
});

export const clientMessage = z.discriminatedUnion("type", [
  helloMessage,
  pointMessage,
  endMessage,
  graspCycleMessage,
]);

export type Effector = z.infer<typeof helloMessage>["effector"];
export type ClientMessage = z.infer<typeof clientMessage>;

export function buildHello(effector: Effector): ClientMessage {
  return helloMessage.parse({ type: "hello", effector });
}

export function buildPoint(t_ms: number, u: number, v: number): ClientMessage {
  return pointMessage.parse({ type: "point", t_ms, u, v });
}

export function buildEnd(): ClientMessage {
  return endMessage.parse({ type: "end" });
}

export function buildGraspCycle(
  amplitude: number,
  period_ms: number,
  cycles: number,
): ClientMessage {
  return graspCycleMessage.parse({
    type: "grasp_cycle",
    amplitude,
    period_ms,
    cycles,
  });
}

// -- server -> client -------------------------------------------------------

export const armStateMessage = z.object({
  type: z.literal("arm_state"),
  t_ms: z.number(),
  q: z.array(z.number()).length(7),
});

export const predictionMessage = z.object({
  type: z.literal("prediction"),
  label: z.string(),
  votes: z.array(z.number()),
  duration_s: z.number(),
  max_displacement_m: z.number(),
});

export const errorMessage = z.object({
  type: z.literal("error"),
  code: z.string(),
  message: z.string(),
});

export const serverMessage = z.discriminatedUnion("type", [
  armStateMessage,
  predictionMessage,
  errorMessage,
]);

export type ArmState = z.infer<typeof armStateMessage>;
export type Prediction = z.infer<typeof predictionMessage>;
export type ServerError = z.infer<typeof errorMessage>;
export type ServerMessage = z.infer<typeof serverMessage>;

/** Parse an incoming frame; malformed messages yield null (logged and
 * skipped by the caller, never rendered). */
export function parseServerMessage(raw: string): ServerMessage | null {
  try {
    return serverMessage.parse(JSON.parse(raw));
  } catch {
    return null;
  }
}

// -- GET /model/info --------------------------------------------------------

export const chainJoint = z.object({
  alpha_rad: z.number(),
  a_m: z.number(),
  d_m: z.number(),
  theta_offset_rad: z.number(),
  limits_rad: z.tuple([z.number(), z.number()]),
});

export const chainDefinition = z.object({
  format: z.literal("arm-chain"),
  version: z.literal(1),
  convention: z.literal("modified-dh"),
  base_height_m: z.number(),
  tool_offset_m: z.array(z.number()).length(3),
  joints: z.array(chainJoint).min(1),
});

export const modelInfo = z.object({
  class_labels: z.array(z.string()),
  n_trees: z.number(),
  feature_count: z.number(),
  chain: chainDefinition,
  home_q: z.array(z.number()).length(7),
  writing_origin: z.array(z.number()).length(3),
  plane_size_m: z.number(),
});

export type ChainDefinition = z.infer<typeof chainDefinition>;
export type ModelInfo = z.infer<typeof modelInfo>;
