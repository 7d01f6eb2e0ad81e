// Control panel wiring: plain DOM, one command per interaction, and no
// local state changes - everything visible comes back from the server.

import type { Connection } from "./connection";
import type { ViewState } from "./store";

function el<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const found = root.querySelector(selector);
  if (!found) throw new Error(`missing element ${selector}`);
  return found as T;
}

export function wirePanel(root: ParentNode, conn: Connection, store: ViewState): void {
  el<HTMLButtonElement>(root, "#btn-pause").onclick = () => conn.send("pause");
  el<HTMLButtonElement>(root, "#btn-resume").onclick = () => conn.send("resume");
  el<HTMLButtonElement>(root, "#btn-step").onclick = () => conn.send("step_once");

  for (const action of [0, 1, 2]) {
    el<HTMLButtonElement>(root, `#btn-action-${action}`).onclick = () =>
      conn.send("set_action_override", { action });
  }

  const wireSlider = (entity: string) => {
    const slider = el<HTMLInputElement>(root, `#vel-${entity}`);
    const label = el<HTMLSpanElement>(root, `#vel-${entity}-value`);
    slider.oninput = () => {
      label.textContent = `${Number(slider.value).toFixed(2)} m/s`;
    };
    slider.onchange = () => conn.send("set_velocity", { entity, vx: Number(slider.value) });
  };
  wireSlider("gnb");
  wireSlider("ue");
  wireSlider("obstacle");

  const motionEntity = el<HTMLSelectElement>(root, "#motion-entity");
  const motionModel = el<HTMLSelectElement>(root, "#motion-model");
  el<HTMLButtonElement>(root, "#btn-motion").onclick = () => {
    const payload: Record<string, unknown> = { entity: motionEntity.value, model: motionModel.value };
    if (motionModel.value === "bounce") {
      payload.speed = 0.6;
    }
    conn.send("set_motion_model", payload);
  };

  const useCase = el<HTMLSelectElement>(root, "#use-case");
  el<HTMLButtonElement>(root, "#btn-reset").onclick = () =>
    conn.send("reset_scenario", { use_case: useCase.value });

  const mode = el<HTMLSelectElement>(root, "#mode");
  el<HTMLButtonElement>(root, "#btn-mode").onclick = () => conn.send("set_mode", { mode: mode.value });

  const policyPath = el<HTMLInputElement>(root, "#policy-path");
  el<HTMLButtonElement>(root, "#btn-policy").onclick = () =>
    conn.send("load_policy", { path: policyPath.value });

  const controls = Array.from(root.querySelectorAll<HTMLButtonElement | HTMLInputElement | HTMLSelectElement>(
    "button, input, select",
  )).filter((node) => !node.classList.contains("always-on"));

  const refresh = () => {
    for (const node of controls) {
      node.disabled = !store.connected;
    }
  };
  conn.onChange(refresh);
  refresh();
}
