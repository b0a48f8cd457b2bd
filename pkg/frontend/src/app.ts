/** Browser bootstrap: corpus picker, tactic box, undo/export buttons. */

import { SessionApi } from "./api.js";
import { replaceChildrenWith } from "./dom.js";
import { UiSessionModel } from "./model.js";
import { expandInput, PALETTE } from "./palette.js";
import { renderProofView } from "./view.js";

export function startApp(root: Element, baseUrl = ""): void {
  const api = new SessionApi(baseUrl);
  const model = new UiSessionModel(api);

  root.innerHTML = `
    <header>
      <select id="corpus"></select>
      <select id="lemma"></select>
      <button id="load">Load</button>
      <button id="undo" disabled>Undo</button>
      <button id="export" disabled>Export transcript</button>
      <button id="resync" disabled>Resync</button>
    </header>
    <main id="proof"></main>
    <footer>
      <div id="palette"></div>
      <input id="tactic" placeholder="tactic sentence…  (\\mapsto expands to ↦)" size="60" />
      <button id="send">Apply</button>
      <div id="net-error"></div>
    </footer>`;

  const el = <T extends Element>(sel: string): T => {
    const found = root.querySelector(sel);
    if (!found) throw new Error(`missing ${sel}`);
    return found as T;
  };

  const proofEl = el<HTMLElement>("#proof");
  const corpusSel = el<HTMLSelectElement>("#corpus");
  const lemmaSel = el<HTMLSelectElement>("#lemma");
  const tacticBox = el<HTMLInputElement>("#tactic");
  const undoBtn = el<HTMLButtonElement>("#undo");
  const exportBtn = el<HTMLButtonElement>("#export");
  const resyncBtn = el<HTMLButtonElement>("#resync");

  const paletteEl = el<HTMLElement>("#palette");
  for (const entry of PALETTE) {
    const b = document.createElement("button");
    b.textContent = entry.symbol;
    b.title = entry.hint;
    b.addEventListener("click", () => {
      tacticBox.value += entry.symbol;
      tacticBox.focus();
    });
    paletteEl.appendChild(b);
  }

  const redraw = () => {
    if (model.state) {
      replaceChildrenWith(proofEl, renderProofView(model.state));
    }
    undoBtn.disabled = !model.canUndo;
    exportBtn.disabled = model.state === null;
    resyncBtn.disabled = model.state === null;
    el<HTMLElement>("#net-error").textContent = model.lastNetworkError ?? "";
  };

  const scripts = new Map<string, string>();
  api.corpus().then((entries) => {
    for (const e of entries) {
      scripts.set(e.name, e.text);
      const opt = document.createElement("option");
      opt.value = e.name;
      opt.textContent = e.name;
      corpusSel.appendChild(opt);
    }
    refreshLemmas();
  });

  const refreshLemmas = () => {
    const text = scripts.get(corpusSel.value) ?? "";
    lemmaSel.innerHTML = "";
    for (const m of text.matchAll(/(?:Lemma|Theorem)\s+([A-Za-z0-9_']+)/g)) {
      const opt = document.createElement("option");
      opt.value = m[1] ?? "";
      opt.textContent = m[1] ?? "";
      lemmaSel.appendChild(opt);
    }
  };
  corpusSel.addEventListener("change", refreshLemmas);

  el<HTMLButtonElement>("#load").addEventListener("click", async () => {
    const text = scripts.get(corpusSel.value);
    if (!text) return;
    await model.load(text, lemmaSel.value);
    redraw();
  });

  const send = async () => {
    if (!tacticBox.value.trim() || model.pending) return;
    try {
      await model.submitTactic(tacticBox.value);
      tacticBox.value = "";
    } catch {
      /* network failure: lastNetworkError is shown, input preserved */
    }
    redraw();
  };
  el<HTMLButtonElement>("#send").addEventListener("click", send);
  tacticBox.addEventListener("keydown", (ev) => {
    if ((ev as KeyboardEvent).key === "Enter") void send();
  });
  tacticBox.addEventListener("input", () => {
    const expanded = expandInput(tacticBox.value);
    if (expanded !== tacticBox.value) tacticBox.value = expanded;
  });

  undoBtn.addEventListener("click", async () => {
    await model.undo();
    redraw();
  });
  resyncBtn.addEventListener("click", async () => {
    await model.resync();
    redraw();
  });
  exportBtn.addEventListener("click", () => {
    const blob = new Blob([model.exportTranscript()], { type: "text/plain" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "transcript.v";
    a.click();
  });
}
