// Plain object export (no `vitest/config` import) so the globally installed
// vitest can load this config without a local vitest package to resolve.
export default {
  test: {
    include: ["test/**/*.test.ts"],
    // The end-to-end test spawns the Python session server and waits for it
    // to come up, so give it generous room.
    testTimeout: 60000,
    hookTimeout: 60000,
  },
};
