import type { Controller } from '../controller';
import type { Choice, StyleDimension } from '../types';

function currentChoice(controller: Controller, dimId: string): Choice {
  return controller.store.get().selection?.choices[dimId] ?? { mode: 'auto' };
}

function renderDimension(
  controller: Controller,
  category: string,
  dim: StyleDimension
): HTMLElement {
  const block = document.createElement('fieldset');
  block.className = `dimension ${category}`;
  block.dataset.dimensionId = dim.id;

  const legend = document.createElement('legend');
  legend.textContent = dim.label;
  block.appendChild(legend);

  const chosen = currentChoice(controller, dim.id);

  const addRadio = (value: string, text: string, checked: boolean, pick: () => Choice) => {
    const wrap = document.createElement('label');
    const radio = document.createElement('input');
    radio.type = 'radio';
    radio.name = `dim-${dim.id}`;
    radio.value = value;
    radio.checked = checked;
    radio.addEventListener('change', () => controller.chooseStyle(dim.id, pick()));
    wrap.append(radio, document.createTextNode(' ' + text));
    block.appendChild(wrap);
  };

  for (const option of dim.options) {
    addRadio(
      option.id,
      `${option.label}: ${option.description}`,
      chosen.mode === 'option' && chosen.option_id === option.id,
      () => ({ mode: 'option', option_id: option.id })
    );
  }
  addRadio('auto', 'Let the system decide', chosen.mode === 'auto', () => ({
    mode: 'auto',
  }));

  const custom = document.createElement('input');
  custom.type = 'text';
  custom.className = 'custom-style';
  custom.placeholder = 'Or describe your own...';
  if (chosen.mode === 'custom') custom.value = chosen.text;
  custom.addEventListener('change', () => {
    const text = custom.value.trim();
    if (text) controller.chooseStyle(dim.id, { mode: 'custom', text });
  });
  block.appendChild(custom);
  return block;
}

export function renderStyleStep(root: HTMLElement, controller: Controller): void {
  const state = controller.store.get();
  const palette = state.palette;
  if (!palette) {
    root.textContent = 'No style palette yet. Review the plan first.';
    return;
  }

  if (state.paletteStale) {
    const note = document.createElement('p');
    note.className = 'stale-note';
    note.textContent =
      'The plan changed since this palette was proposed; it will be refreshed on generation.';
    root.appendChild(note);
  }

  const writing = document.createElement('section');
  writing.className = 'writing-dimensions';
  const writingTitle = document.createElement('h2');
  writingTitle.textContent = 'Writing style';
  writing.appendChild(writingTitle);
  for (const dim of palette.writing) {
    writing.appendChild(renderDimension(controller, 'writing', dim));
  }

  const interaction = document.createElement('section');
  interaction.className = 'interaction-dimensions';
  const interactionTitle = document.createElement('h2');
  interactionTitle.textContent = 'Interaction style';
  interaction.appendChild(interactionTitle);
  for (const dim of palette.interaction) {
    interaction.appendChild(renderDimension(controller, 'interaction', dim));
  }

  const generate = document.createElement('button');
  generate.className = 'generate';
  generate.textContent = 'Generate document';
  generate.disabled = state.busy;
  generate.addEventListener('click', () => void controller.generateDocument());

  root.append(writing, interaction, generate);
}
