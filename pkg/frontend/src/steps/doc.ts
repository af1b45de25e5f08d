import type { Controller } from '../controller';

export function renderDocStep(root: HTMLElement, controller: Controller): void {
  const state = controller.store.get();
  const doc = state.document;

  if (state.progress.length && !doc) {
    const log = document.createElement('ul');
    log.className = 'progress-log';
    for (const event of state.progress) {
      const item = document.createElement('li');
      item.textContent = event.unit_id
        ? `${event.unit_id} ${event.step}: ${event.status}`
        : event.status;
      log.appendChild(item);
    }
    root.appendChild(log);
    return;
  }
  if (!doc) {
    root.textContent = 'No document yet. Generate one from the style stage.';
    return;
  }

  if (doc.stale) {
    const note = document.createElement('p');
    note.className = 'stale-note';
    note.textContent = 'The plan changed after this document was generated.';
    root.appendChild(note);
  }

  const meta = document.createElement('p');
  meta.className = 'doc-meta';
  meta.textContent = `${doc.sections.length} sections, ${doc.total_chars} characters`;
  root.appendChild(meta);

  const frame = document.createElement('iframe');
  frame.className = 'doc-frame';
  frame.setAttribute('sandbox', 'allow-scripts');
  frame.srcdoc = doc.html;
  root.appendChild(frame);

  const sid = state.session?.id ?? '';
  const download = document.createElement('a');
  download.className = 'download';
  download.href = controller.client.downloadUrl(sid);
  download.download = 'document.html';
  download.textContent = 'Download HTML';
  root.appendChild(download);

  const chat = document.createElement('form');
  chat.className = 'doc-chat';
  const input = document.createElement('input');
  input.type = 'text';
  input.placeholder = 'Ask for a change...';
  const target = document.createElement('select');
  for (const [value, text] of [
    ['doc', 'Edit this document'],
    ['spec', 'Edit the underlying plan'],
  ] as const) {
    const option = document.createElement('option');
    option.value = value;
    option.textContent = text;
    target.appendChild(option);
  }
  const send = document.createElement('button');
  send.type = 'submit';
  send.textContent = 'Send';
  chat.addEventListener('submit', (event) => {
    event.preventDefault();
    const message = input.value.trim();
    if (message) {
      void controller.sendChat(message, target.value as 'spec' | 'doc');
    }
  });
  chat.append(input, target, send);
  root.appendChild(chat);

  const history = controller.store.get().session?.chat_log ?? [];
  if (history.length) {
    const log = document.createElement('ul');
    log.className = 'chat-log';
    for (const record of history) {
      const item = document.createElement('li');
      item.textContent = `[${record.target}] ${record.message}`;
      log.appendChild(item);
    }
    root.appendChild(log);
  }

  const evalButton = document.createElement('button');
  evalButton.className = 'run-eval';
  evalButton.textContent = 'Evaluate document';
  evalButton.disabled = state.busy;
  evalButton.addEventListener('click', () => void controller.runEval());
  root.appendChild(evalButton);

  const report = state.evalReport;
  if (report) {
    const table = document.createElement('dl');
    table.className = 'eval-report';
    const rows: [string, string][] = [
      ['Functionality', report.if_score.toFixed(2)],
      ['Efficiency', `${report.eff.toFixed(1)} chars/s`],
      ['Richness', report.cr.toFixed(2)],
      ['Design', report.id_score.toFixed(2)],
      ['Quality', report.iq.toFixed(2)],
    ];
    for (const [term, value] of rows) {
      const dt = document.createElement('dt');
      dt.textContent = term;
      const dd = document.createElement('dd');
      dd.textContent = value;
      table.append(dt, dd);
    }
    root.appendChild(table);
  }
}
