import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    testTimeout: 120_000,
    hookTimeout: 120_000,
    // The end-to-end suite drives two live server subprocesses; run files
    // sequentially so ports and process lifetimes stay predictable.
    fileParallelism: false,
  },
});
