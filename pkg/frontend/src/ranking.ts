/** Pure keyboard-operable ranking board.
 *
 * The board holds the K blinded candidates of one task in display order.
 * State transitions are pure functions of (state, key), so the logic is
 * testable without a DOM:
 *
 *   ArrowUp / k     move cursor up
 *   ArrowDown / j   move cursor down
 *   1..9            assign that rank to the candidate under the cursor
 *                   (stealing it from any slot that already holds it)
 *   Backspace / 0   clear the rank under the cursor
 *
 * A submission is allowed only when the assigned ranks form a permutation
 * of 1..K.
 */

export interface BoardState {
  readonly candidates: readonly string[];
  /** ranks[i] is the rank assigned to display slot i, or null. */
  readonly ranks: readonly (number | null)[];
  readonly cursor: number;
}

export function createBoard(candidates: readonly string[]): BoardState {
  if (candidates.length < 2) {
    throw new Error("nothing to rank: need at least 2 candidates");
  }
  return {
    candidates: [...candidates],
    ranks: candidates.map(() => null),
    cursor: 0,
  };
}

export function isPermutation(ranking: readonly number[], k: number): boolean {
  if (ranking.length !== k) return false;
  const sorted = [...ranking].sort((a, b) => a - b);
  return sorted.every((value, i) => value === i + 1);
}

export function isComplete(state: BoardState): boolean {
  return (
    state.ranks.every((r) => r !== null) &&
    isPermutation(state.ranks as number[], state.candidates.length)
  );
}

/** The completed display-order ranking; throws if the board is incomplete. */
export function ranking(state: BoardState): number[] {
  if (!isComplete(state)) {
    throw new Error("ranking incomplete: assign every rank exactly once");
  }
  return state.ranks.map((r) => r as number);
}

export function handleKey(state: BoardState, key: string): BoardState {
  const k = state.candidates.length;
  if (key === "ArrowUp" || key === "k") {
    return { ...state, cursor: (state.cursor + k - 1) % k };
  }
  if (key === "ArrowDown" || key === "j") {
    return { ...state, cursor: (state.cursor + 1) % k };
  }
  if (key === "Backspace" || key === "Delete" || key === "0") {
    const ranks = [...state.ranks];
    ranks[state.cursor] = null;
    return { ...state, ranks };
  }
  if (/^[1-9]$/.test(key)) {
    const rank = Number(key);
    if (rank > k) return state;
    const ranks = state.ranks.map((r) => (r === rank ? null : r));
    ranks[state.cursor] = rank;
    return { ...state, ranks };
  }
  return state;
}

/** Convenience for scripted sessions: drive the board with key events until
 * the given display-order ranking is assigned. */
export function applyRanking(
  state: BoardState,
  displayRanking: readonly number[],
): BoardState {
  if (!isPermutation(displayRanking, state.candidates.length)) {
    throw new Error("not a permutation of 1..K");
  }
  let current = state;
  for (let slot = 0; slot < displayRanking.length; slot += 1) {
    while (current.cursor !== slot) {
      current = handleKey(current, "ArrowDown");
    }
    current = handleKey(current, String(displayRanking[slot]));
  }
  return current;
}
