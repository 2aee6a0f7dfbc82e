import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    testTimeout: 15000,
    hookTimeout: 120000,
    // the integration file owns a real server process; keep files sequential
    fileParallelism: false,
  },
});
