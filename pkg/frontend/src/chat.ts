/**
 * Chat view state: turns render in submission order; a pending flag blocks
 * duplicate submission while a request is in flight; an HTTP error becomes
 * an inline banner and the typed input is preserved.
 */

import { Turn } from "./types.js";

export interface ChatState {
  session: string;
  turns: Turn[];
  pending: boolean;
  /** Error banner text, or null when the last action succeeded. */
  error: string | null;
  /** Input preserved across a failed submission. */
  draft: string;
}

export interface ChatOptions {
  session?: string;
  send: (question: string, session: string) => Promise<Turn>;
  onRender: (state: ChatState) => void;
}

export class ChatController {
  private state: ChatState;

  constructor(private readonly options: ChatOptions) {
    this.state = {
      session: options.session ?? "default",
      turns: [],
      pending: false,
      error: null,
      draft: "",
    };
  }

  getState(): ChatState {
    return { ...this.state, turns: [...this.state.turns] };
  }

  setDraft(text: string): void {
    this.state = { ...this.state, draft: text };
  }

  /** Replace the turn list, e.g. from GET /turns after a page reload. */
  loadTurns(turns: Turn[]): void {
    this.state = { ...this.state, turns: [...turns] };
    this.options.onRender(this.getState());
  }

  /**
   * Submit the draft. Returns false without sending when the input is empty
   * or a request is already pending.
   */
  async submit(): Promise<boolean> {
    const question = this.state.draft.trim();
    if (question === "" || this.state.pending) return false;
    this.state = { ...this.state, pending: true, error: null };
    this.options.onRender(this.getState());
    try {
      const turn = await this.options.send(question, this.state.session);
      this.state = {
        ...this.state,
        pending: false,
        turns: [...this.state.turns, turn],
        draft: "",
      };
    } catch (error) {
      this.state = { ...this.state, pending: false, error: String(error) };
    }
    this.options.onRender(this.getState());
    return this.state.error === null;
  }
}
