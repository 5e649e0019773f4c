/** App shell: hash router + session handling.
 *
 * Routes: #/ (dashboard), #/articles/<id>, #/upload, #/compare, #/login.
 * The bearer token lives in sessionStorage for the tab's lifetime.
 */

import { Client } from "./api.js";
import { errorBox } from "./render.js";
import { mountArticle } from "./pages/article.js";
import { mountCompare } from "./pages/compare.js";
import { mountDashboard } from "./pages/dashboard.js";
import { mountLogin } from "./pages/login.js";
import { mountUpload } from "./pages/upload.js";

const TOKEN_KEY = "fablink-token";

const client = new Client("");
const app = document.getElementById("app")!;
const navStatus = document.getElementById("nav-status")!;

function currentToken(): string | null {
  return sessionStorage.getItem(TOKEN_KEY);
}

function setSession(token: string | null, who: string | null): void {
  if (token === null) {
    sessionStorage.removeItem(TOKEN_KEY);
  } else {
    sessionStorage.setItem(TOKEN_KEY, token);
  }
  client.setToken(token);
  navStatus.innerHTML = who
    ? `${who} · <a href="#/logout">sign out</a>`
    : `<a href="#/login">sign in</a>`;
}

async function route(): Promise<void> {
  const hash = location.hash || "#/";
  const [path] = hash.slice(1).split("?");
  const token = currentToken();
  client.setToken(token);

  if (path === "/logout") {
    setSession(null, null);
    location.hash = "#/login";
    return;
  }
  if (token === null || path === "/login") {
    mountLogin(app, client, (me, newToken) => {
      setSession(newToken, `${me.user_id} (${me.role})`);
      location.hash = "#/";
      void route();
    });
    return;
  }

  try {
    if (path === "/" || path === "") {
      await mountDashboard(app, client);
    } else if (path.startsWith("/articles/")) {
      await mountArticle(app, client, decodeURIComponent(path.slice("/articles/".length)));
    } else if (path === "/upload") {
      await mountUpload(app, client);
    } else if (path === "/compare") {
      await mountCompare(app, client);
    } else {
      app.innerHTML = errorBox(`Unknown page: ${path}`);
    }
  } catch (err) {
    app.innerHTML = errorBox(err instanceof Error ? err.message : String(err));
  }
}

window.addEventListener("hashchange", () => void route());
window.addEventListener("DOMContentLoaded", () => {
  const token = currentToken();
  if (token !== null) {
    client.setToken(token);
    void client
      .me()
      .then((me) => setSession(token, `${me.user_id} (${me.role})`))
      .catch(() => setSession(null, null));
  } else {
    setSession(null, null);
  }
  void route();
});
