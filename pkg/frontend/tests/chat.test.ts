import { describe, expect, it } from "vitest";

import { ChatController, ChatState } from "../src/chat.js";
import { Turn, TurnSchema } from "../src/types.js";
import turnSql from "./fixtures/turn-fig-sql.json";
import turnGuard from "./fixtures/turn-fig-guard.json";

const sqlTurn = (): Turn => TurnSchema.parse(turnSql);
const guardTurn = (): Turn => TurnSchema.parse(turnGuard);

function makeChat(send: (q: string, s: string) => Promise<Turn>) {
  const states: ChatState[] = [];
  const chat = new ChatController({ send, onRender: (s) => states.push(s) });
  return { chat, states };
}

describe("ChatController", () => {
  it("appends turns in submission order", async () => {
    const answers = [sqlTurn(), guardTurn()];
    const { chat } = makeChat(async () => answers.shift()!);
    chat.setDraft("first");
    await chat.submit();
    chat.setDraft("second");
    await chat.submit();
    const turns = chat.getState().turns;
    expect(turns.map((t) => t.turn_id)).toEqual(["turn-fig-sql", "turn-fig-guard"]);
  });

  it("pending blocks duplicate submission", async () => {
    let calls = 0;
    let release!: (turn: Turn) => void;
    const { chat } = makeChat(() => {
      calls += 1;
      return new Promise<Turn>((resolve) => (release = resolve));
    });
    chat.setDraft("slow question");
    const first = chat.submit();
    chat.setDraft("impatient retry");
    expect(await chat.submit()).toBe(false);
    expect(calls).toBe(1);
    release(sqlTurn());
    expect(await first).toBe(true);
  });

  it("empty input does not send", async () => {
    let calls = 0;
    const { chat } = makeChat(async () => {
      calls += 1;
      return sqlTurn();
    });
    chat.setDraft("   ");
    expect(await chat.submit()).toBe(false);
    expect(calls).toBe(0);
  });

  it("an HTTP error becomes a banner and preserves the input", async () => {
    const { chat } = makeChat(async () => {
      throw new Error("HTTP 400 — validate: question must be a string");
    });
    chat.setDraft("my question");
    expect(await chat.submit()).toBe(false);
    const state = chat.getState();
    expect(state.error).toContain("HTTP 400");
    expect(state.draft).toBe("my question");
    expect(state.turns).toHaveLength(0);
    expect(state.pending).toBe(false);
  });

  it("loadTurns replaces the list for a page reload", () => {
    const { chat, states } = makeChat(async () => sqlTurn());
    chat.loadTurns([guardTurn(), sqlTurn()]);
    expect(chat.getState().turns).toHaveLength(2);
    expect(states.at(-1)!.turns[0].turn_id).toBe("turn-fig-guard");
  });
});
