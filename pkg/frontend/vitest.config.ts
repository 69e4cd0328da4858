import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // training and subprocess suites run whole pipelines
    testTimeout: 600_000,
    hookTimeout: 120_000,
    pool: "forks",
  },
});
