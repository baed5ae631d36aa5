export { encodeFrame, FrameDecoder, MAX_FRAME } from "./framing.js";
export {
  BridgeError,
  BridgeSession,
  PROTOCOL_VERSION,
  type ResetResult,
  type SessionOptions,
  type SlotAction,
  type SpaceDescriptor,
  type StepResult,
} from "./session.js";
