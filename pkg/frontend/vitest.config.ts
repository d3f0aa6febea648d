import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["test/**/*.test.ts"],
    // the server test boots the Python service, which fits a model first
    testTimeout: 60_000,
    hookTimeout: 120_000,
  },
});
