import { defineConfig } from "vitest/config";

// ONNX session startup plus python subprocesses need headroom
export default defineConfig({
  test: {
    testTimeout: 30000,
    hookTimeout: 30000,
  },
});
