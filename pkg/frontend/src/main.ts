/** Console entry point.
 *
 * URL query: ?server=ws://host:port  — gateway address (default same host)
 *            &session=s1             — attach to an existing session
 *            &scenario=traffic|water — open a fresh session instead
 *            &power=none|limited|unlimited, &adaptivity=..., &seed=N
 */

import { envelope } from "./protocol.js";
import { bindControls, renderApp } from "./render.js";
import { WebSocketTransport } from "./transport.js";
import { ViewModel } from "./viewmodel.js";

function configFromQuery(params: URLSearchParams): Record<string, unknown> {
  const config: Record<string, unknown> = {};
  config.scenario = params.get("scenario") ?? "traffic";
  if (params.get("adaptivity")) config.adaptivity = params.get("adaptivity");
  if (params.get("seed")) config.seed = Number(params.get("seed"));
  if (params.get("power")) config.regulator = { power: params.get("power") };
  if (params.get("forecast") === "on") config.forecast = { enabled: true };
  return config;
}

export function boot(root: HTMLElement): ViewModel {
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server")
    ?? `ws://${window.location.hostname}:8700`;

  const vm = new ViewModel((msg) => transport.send(msg));
  const rerender = () => renderApp(vm, root);

  const transport = new WebSocketTransport(server, {
    onOpen: () => {
      vm.onConnected();
      const session = params.get("session");
      if (session) {
        transport.send(envelope("attach", null, { session }));
      } else {
        transport.send(envelope("open", null, { config: configFromQuery(params) }));
      }
      rerender();
    },
    onClose: () => {
      vm.onDisconnected();
      rerender();
    },
    onMessage: (msg) => {
      if (msg.type === "opened" && !params.get("live_manual")) {
        transport.send(envelope("start_live", (msg.session as string), {}));
      }
      if (vm.apply(msg)) rerender();
    },
  });

  bindControls(vm, root);
  rerender();
  return vm;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot(document.getElementById("app")!);
}
