/**
 * BridgeSession - subprocess client for the swarmguard environment.
 *
 * Spawns `swarmguard bridge-serve` and speaks its framed JSON protocol:
 * every request gets exactly one response frame, in order, so pending
 * requests resolve strictly FIFO.
 */

import { spawn, ChildProcessWithoutNullStreams } from "node:child_process";
import { encodeFrame, FrameDecoder } from "./framing.js";

export const PROTOCOL_VERSION = 1;

/** Action and observation layout reported by the environment. */
export interface SpaceDescriptor {
  agents: string[];
  external_agents: string[];
  action_size: number;
  message_bits: number;
  combined_action_size: number;
  observation_mode: string;
  observation_length: number;
}

export interface ResetResult {
  observations: Record<string, number[]>;
  spaces: SpaceDescriptor;
}

export interface StepResult {
  observations: Record<string, number[]>;
  reward: number;
  rewards: Record<string, number>;
  done: boolean;
  step: number;
  events: Array<Record<string, unknown>>;
  invalid_actions: string[];
}

/** One external slot's decision: a flat action index, optionally with a
 * 16-bit broadcast frame. */
export type SlotAction = number | [number, number];

export interface SessionOptions {
  /** Server executable, default "swarmguard". */
  command?: string;
  /** Arguments before the protocol starts, default ["bridge-serve"]. */
  args?: string[];
  env?: NodeJS.ProcessEnv;
}

/** Raised when the server answers a request with an error frame. */
export class BridgeError extends Error {}

interface Pending {
  resolve: (frame: Record<string, unknown>) => void;
  reject: (err: Error) => void;
}

export class BridgeSession {
  private child: ChildProcessWithoutNullStreams;
  private decoder = new FrameDecoder();
  private pending: Pending[] = [];
  private stderrTail = "";
  private exited = false;

  constructor(options: SessionOptions = {}) {
    const command = options.command ?? "swarmguard";
    const args = options.args ?? ["bridge-serve"];
    this.child = spawn(command, args, {
      stdio: ["pipe", "pipe", "pipe"],
      env: options.env ?? process.env,
    });
    this.child.stdout.on("data", (chunk: Buffer) => this.onData(chunk));
    this.child.stderr.on("data", (chunk: Buffer) => {
      this.stderrTail = (this.stderrTail + chunk.toString()).slice(-4000);
    });
    this.child.on("error", (err) => this.failAll(err));
    this.child.on("close", () => {
      this.exited = true;
      this.failAll(new Error(`bridge server exited${this.stderrHint()}`));
    });
  }

  /**
   * Version handshake. Call once before reset.
   */
  async hello(): Promise<void> {
    const resp = await this.request({ op: "hello", version: PROTOCOL_VERSION });
    if (resp.package !== "swarmguard" || resp.version !== PROTOCOL_VERSION) {
      throw new BridgeError(`unexpected handshake: ${JSON.stringify(resp)}`);
    }
  }

  /**
   * Start an episode. The config object mirrors the Python episode
   * configuration; omitted fields take the scenario defaults.
   */
  async reset(config: Record<string, unknown>): Promise<ResetResult> {
    const resp = await this.request({ op: "reset", config });
    return resp as unknown as ResetResult;
  }

  /**
   * Advance one step with the given external-slot actions.
   */
  async step(actions: Record<string, SlotAction>): Promise<StepResult> {
    const resp = await this.request({ op: "step", actions });
    return resp as unknown as StepResult;
  }

  /**
   * Ask the server to stop, then release the process. Safe to call
   * twice; after close every request rejects.
   */
  async close(): Promise<void> {
    if (this.exited) {
      return;
    }
    try {
      await this.request({ op: "close" });
    } finally {
      this.child.kill();
    }
  }

  /**
   * Send a raw protocol frame and await its response frame. Error
   * frames reject with BridgeError.
   */
  request(payload: Record<string, unknown>): Promise<Record<string, unknown>> {
    if (this.exited) {
      return Promise.reject(new Error("bridge session is closed"));
    }
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.child.stdin.write(encodeFrame(payload));
    });
  }

  private onData(chunk: Buffer): void {
    let frames: unknown[];
    try {
      frames = this.decoder.push(chunk);
    } catch (err) {
      this.failAll(err instanceof Error ? err : new Error(String(err)));
      this.child.kill();
      return;
    }
    for (const frame of frames) {
      const next = this.pending.shift();
      if (!next) {
        continue; // stray frame after a local failure; drop it
      }
      const resp = frame as Record<string, unknown>;
      if (resp.op === "error") {
        next.reject(new BridgeError(String(resp.message ?? "unknown error")));
      } else {
        next.resolve(resp);
      }
    }
  }

  private failAll(err: Error): void {
    const waiting = this.pending;
    this.pending = [];
    for (const p of waiting) {
      p.reject(err);
    }
  }

  private stderrHint(): string {
    return this.stderrTail ? `: ${this.stderrTail.trim()}` : "";
  }
}
