// Bootstrap: wire the API, session state, and DOM together.

import { GameApi } from "./api.js";
import { grabElements, render } from "./render.js";
import { UiSession } from "./session.js";

const SERVER = (window as { GOHR_SERVER?: string }).GOHR_SERVER ?? "http://127.0.0.1:8000";

async function boot(): Promise<void> {
  const api = new GameApi(SERVER);
  const session = new UiSession(api);
  const els = grabElements(document);
  session.onChange(() => render(document, els, session));

  const select = document.getElementById("rule-select") as HTMLSelectElement;
  const randomOption = document.createElement("option");
  randomOption.value = "random";
  randomOption.textContent = "random hidden rule";
  select.appendChild(randomOption);
  try {
    for (const rule of await api.listRules()) {
      const opt = document.createElement("option");
      opt.value = rule.name;
      opt.textContent = rule.name;
      select.appendChild(opt);
    }
  } catch {
    // server offline; the start button will surface the error
  }

  const startButton = document.getElementById("start") as HTMLButtonElement;
  startButton.addEventListener("click", () => {
    void session.start(select.value || "random").catch((err) => {
      const status = document.getElementById("status");
      if (status) status.textContent = String(err);
    });
  });
}

void boot();
