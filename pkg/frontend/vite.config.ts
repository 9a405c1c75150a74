import { defineConfig } from "vitest/config";

// relative base so the bundle works from any mount path of cmd_serve
export default defineConfig({
  base: "./",
  test: {
    environment: "jsdom",
  },
});
