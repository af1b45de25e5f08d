import { Client } from './api';
import { Controller } from './controller';
import { Store } from './store';
import { renderWizard } from './wizard';

const BASE_URL = (window as { DOCWEAVE_BASE_URL?: string }).DOCWEAVE_BASE_URL ?? '';

export function bootstrap(root: HTMLElement): Controller {
  const controller = new Controller(new Client(BASE_URL), new Store());
  renderWizard(root, controller);

  const resume = new URLSearchParams(window.location.search).get('session');
  if (resume) {
    void controller.resumeSession(resume);
  } else {
    void controller.startSession();
  }
  return controller;
}

const root = document.getElementById('app');
if (root) bootstrap(root);
