/** Explorer bootstrap: wire the state, URL sync, shortlist, and rendering. */

import { ApiClient } from './api.js';
import { buildCompareTable } from './compare.js';
import { renderApp, renderCompareTable } from './render.js';
import { Shortlist } from './shortlist.js';
import { ExplorerState } from './state.js';

const SERVICE_URL =
  new URLSearchParams(window.location.search).get('service') ?? 'http://127.0.0.1:8032';

const client = new ApiClient(SERVICE_URL);
const state = new ExplorerState(client);
const shortlist = new Shortlist(window.localStorage);

const appRoot = document.getElementById('app') as HTMLElement;
const compareRoot = document.getElementById('compare') as HTMLElement;

async function onCompare(ids: string[]): Promise<void> {
  const table = await buildCompareTable(client, ids.slice(0, 4));
  renderCompareTable(compareRoot, table);
  compareRoot.scrollIntoView({ behavior: 'smooth' });
}

state.subscribe(() => {
  // keep the address bar shareable; `service` stays out of the facet state
  const query = state.urlQueryString();
  const service = new URLSearchParams(window.location.search).get('service');
  const parts = new URLSearchParams(query);
  if (service) parts.set('service', service);
  const qs = parts.toString();
  history.replaceState(null, '', qs ? `?${qs}` : window.location.pathname);
  renderApp(appRoot, state, shortlist, { onCompare: (ids) => void onCompare(ids) });
});

const restore = new URLSearchParams(window.location.search);
restore.delete('service');
state.restoreFromUrl(restore.toString());
void state.refresh();
