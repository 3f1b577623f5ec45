import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // The integration test shells out to the Python validator; give it room.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
