/**
 * Wire framing for the subprocess bridge.
 *
 * Every message is a 4-byte big-endian payload length followed by that
 * many bytes of UTF-8 JSON. Payloads above MAX_FRAME are refused on
 * both ends.
 */

export const MAX_FRAME = 1 << 24;

/**
 * Encode one JSON value as a length-prefixed frame.
 */
export function encodeFrame(value: unknown): Buffer {
  const body = Buffer.from(JSON.stringify(value), "utf8");
  if (body.length > MAX_FRAME) {
    throw new Error(`frame of ${body.length} bytes exceeds limit`);
  }
  const header = Buffer.allocUnsafe(4);
  header.writeUInt32BE(body.length, 0);
  return Buffer.concat([header, body]);
}

/**
 * Incremental frame decoder for a byte stream.
 *
 * Stream chunks do not respect frame boundaries, so the decoder
 * buffers partial input and yields each complete payload exactly once.
 */
export class FrameDecoder {
  private buffer: Buffer = Buffer.alloc(0);

  /**
   * Absorb a chunk and return every frame completed by it.
   */
  push(chunk: Buffer): unknown[] {
    this.buffer = this.buffer.length === 0 ? chunk : Buffer.concat([this.buffer, chunk]);
    const frames: unknown[] = [];
    while (this.buffer.length >= 4) {
      const length = this.buffer.readUInt32BE(0);
      if (length > MAX_FRAME) {
        throw new Error(`frame of ${length} bytes exceeds limit`);
      }
      if (this.buffer.length < 4 + length) {
        break;
      }
      const body = this.buffer.subarray(4, 4 + length);
      this.buffer = this.buffer.subarray(4 + length);
      frames.push(JSON.parse(body.toString("utf8")));
    }
    return frames;
  }

  /** Bytes held back waiting for the rest of a frame. */
  get pending(): number {
    return this.buffer.length;
  }
}
