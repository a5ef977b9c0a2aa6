import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    // the DOM window shares the test service's origin so fetch is same-origin
    environmentOptions: { happyDOM: { url: "http://127.0.0.1:8695" } },
    globalSetup: ["./test/service.setup.ts"],
    testTimeout: 20000,
    hookTimeout: 60000,
  },
});
