/** Token login: validates the pasted bearer token against GET /me. */

import type { Client } from "../api.js";
import type { MeJson } from "../types.js";
import { card, errorBox } from "../render.js";

export function renderLogin(): string {
  return card(
    "Sign in",
    `<p>Paste the bearer token you received when your account was created.</p>
     <form id="login-form">
       <label>API token <input id="login-token" type="password" autocomplete="off" required /></label>
       <button type="submit">Sign in</button>
     </form>
     <div id="login-result"></div>`,
  );
}

export function mountLogin(
  root: HTMLElement,
  client: Client,
  onLogin: (me: MeJson, token: string) => void,
): void {
  root.innerHTML = renderLogin();
  const form = root.querySelector<HTMLFormElement>("#login-form")!;
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void (async () => {
      const token = root.querySelector<HTMLInputElement>("#login-token")!.value.trim();
      const result = root.querySelector<HTMLElement>("#login-result")!;
      client.setToken(token);
      try {
        const me = await client.me();
        onLogin(me, token);
      } catch (err) {
        client.setToken(null);
        result.innerHTML = errorBox(
          err instanceof Error ? err.message : String(err),
        );
      }
    })();
  });
}
