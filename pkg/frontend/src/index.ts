export * from "./protocol.js";
export * from "./state.js";
export * from "./view.js";
export * from "./client.js";
export * from "./overlay.js";
