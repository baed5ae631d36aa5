import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // parity tests shell out to the Python package repeatedly
    testTimeout: 60_000,
    hookTimeout: 30_000,
  },
});
