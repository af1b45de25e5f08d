import { describe, expect, it } from 'vitest';

import { ApiError, Client } from '../src/api';
import { FakeBackend } from './fakeBackend';

function freshClient(): { client: Client; backend: FakeBackend } {
  const backend = new FakeBackend();
  return { client: new Client('', backend.fetch), backend };
}

describe('Client', () => {
  it('creates and fetches sessions', async () => {
    const { client } = freshClient();
    const created = await client.createSession();
    expect(created.stage).toBe('Topic');
    const fetched = await client.getSession(created.id);
    expect(fetched.id).toBe(created.id);
    const all = await client.listSessions();
    expect(all.map((s) => s.id)).toContain(created.id);
  });

  it('sends JSON bodies with the right method and path', async () => {
    const { client, backend } = freshClient();
    const session = await client.createSession();
    await client.setTopic(session.id, 'How do sails work?');
    const last = backend.requests[backend.requests.length - 1];
    expect(last.method).toBe('POST');
    expect(last.path).toBe(`/sessions/${session.id}/topic`);
    expect(last.body).toEqual({ topic: 'How do sails work?' });
  });

  it('raises ApiError with the server detail on conflict', async () => {
    const { client } = freshClient();
    const session = await client.createSession();
    const err = await client.getSpec(session.id).then(
      () => null,
      (e: unknown) => e
    );
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(409);
    expect((err as ApiError).message).toBe('no spec yet');
  });

  it('raises ApiError 404 for an unknown session', async () => {
    const { client } = freshClient();
    const err = await client.getSession('nope').then(
      () => null,
      (e: unknown) => e
    );
    expect((err as ApiError).status).toBe(404);
  });

  it('patches the spec and reports staleness', async () => {
    const { client } = freshClient();
    const session = await client.createSession();
    await client.setTopic(session.id, 'Lift');
    const patched = await client.patchSpec(session.id, [
      { op: 'reorder_units', permutation: [2, 1] },
    ]);
    expect(patched.spec.units.map((u) => u.id)).toEqual(['u2', 'u1']);
    expect(patched.document_stale).toBe(false);
  });

  it('builds the download URL from the base URL', () => {
    const client = new Client('http://api.example');
    expect(client.downloadUrl('s9')).toBe(
      'http://api.example/sessions/s9/document/download'
    );
  });

  it('streams progress events with replay from a sequence number', async () => {
    const { client } = freshClient();
    const session = await client.createSession();
    await client.setTopic(session.id, 'Lift');
    await client.generatePalette(session.id);
    await client.generateDocument(session.id);

    const all: number[] = [];
    await client.streamEvents(session.id, 0, (e) => all.push(e.seq));
    expect(all).toEqual([1, 2, 3, 4, 5, 6, 7, 8, 9]);

    const tail: number[] = [];
    await client.streamEvents(session.id, 7, (e) => tail.push(e.seq));
    expect(tail).toEqual([8, 9]);
  });

  it('runs the evaluator over the generated document', async () => {
    const { client } = freshClient();
    const session = await client.createSession();
    await client.setTopic(session.id, 'Lift');
    await client.generatePalette(session.id);
    await client.generateDocument(session.id);
    const report = await client.runEval(session.id);
    expect(report.if_score).toBe(1.0);
    expect(report.iq).toBe(4.0);
  });
});
