import { Api } from "./api.js";
import { App } from "./app.js";
import { Store, stateFromQuery } from "./state.js";

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const apiBase = params.get("api") ?? "";
  const app = new App(document, new Api(apiBase), new Store());
  await app.init();

  // Restore a shared view: topic first, then the retrieval pair.
  const restored = stateFromQuery(window.location.search);
  if (restored.topic !== null) {
    await app.selectTopic(restored.topic).catch(() => undefined);
    if (restored.trendWords.length > 0) {
      app.store.setTrendWords(restored.trendWords);
    }
    if (restored.pair) {
      await app.showDocuments(restored.pair.word, restored.pair.time).catch(() => undefined);
    }
  }
}

void boot();
