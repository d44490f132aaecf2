#!/usr/bin/env python3
"""Regenerate the bundled benchmark datasets under data/.

Both datasets are fully determined, so the CSVs can be rebuilt from scratch:

* titanic.csv    -- the classic 2201-passenger Titanic survival table
                    (class x age x sex x survived contingency counts).
* tictactoe.csv  -- all 958 terminal Tic-Tac-Toe boards ("x" moved first);
                    class is "positive" iff x has three in a row.
"""
import csv
import itertools
import os

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "data")

# Counts indexed by (class, age, sex) -> (died, survived).
TITANIC_TABLE = {
    ("1st", "child", "male"): (0, 5),
    ("2nd", "child", "male"): (0, 11),
    ("3rd", "child", "male"): (35, 13),
    ("crew", "child", "male"): (0, 0),
    ("1st", "child", "female"): (0, 1),
    ("2nd", "child", "female"): (0, 13),
    ("3rd", "child", "female"): (17, 14),
    ("crew", "child", "female"): (0, 0),
    ("1st", "adult", "male"): (118, 57),
    ("2nd", "adult", "male"): (154, 14),
    ("3rd", "adult", "male"): (387, 75),
    ("crew", "adult", "male"): (670, 192),
    ("1st", "adult", "female"): (4, 140),
    ("2nd", "adult", "female"): (13, 80),
    ("3rd", "adult", "female"): (89, 76),
    ("crew", "adult", "female"): (3, 20),
}


def write_titanic(path):
    rows = []
    for (cls, age, sex), (died, survived) in sorted(TITANIC_TABLE.items()):
        rows.extend([cls, age, sex, "no"] for _ in range(died))
        rows.extend([cls, age, sex, "yes"] for _ in range(survived))
    assert len(rows) == 2201
    assert sum(r[3] == "yes" for r in rows) == 711
    # "no" must appear before the first "yes" so the label order is (no, yes).
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    assert rows[0][3] == "no" or any(r[3] == "no" for r in rows[:1])
    first_no = next(i for i, r in enumerate(rows) if r[3] == "no")
    first_yes = next(i for i, r in enumerate(rows) if r[3] == "yes")
    if first_yes < first_no:
        rows[first_no], rows[first_yes] = rows[first_yes], rows[first_no]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["class", "age", "sex", "survived"])
        w.writerows(rows)


LINES = [(0, 1, 2), (3, 4, 5), (6, 7, 8),
         (0, 3, 6), (1, 4, 7), (2, 5, 8),
         (0, 4, 8), (2, 4, 6)]

CELLS = ["top-left-square", "top-middle-square", "top-right-square",
         "middle-left-square", "middle-middle-square", "middle-right-square",
         "bottom-left-square", "bottom-middle-square", "bottom-right-square"]


def has_line(board, player):
    return any(all(board[i] == player for i in line) for line in LINES)


def won_on_last_move(board, player):
    # The final move must have created the first line for `player`: some
    # occupied cell, when cleared, leaves the player without a line.
    for i in range(9):
        if board[i] == player:
            prev = board[:i] + "b" + board[i + 1:]
            if not has_line(prev, player):
                return True
    return False


def terminal_boards():
    for cells in itertools.product("xob", repeat=9):
        board = "".join(cells)
        nx, no = board.count("x"), board.count("o")
        x_win, o_win = has_line(board, "x"), has_line(board, "o")
        if x_win and not o_win and nx == no + 1 and won_on_last_move(board, "x"):
            yield board, "positive"
        elif o_win and not x_win and nx == no and won_on_last_move(board, "o"):
            yield board, "negative"
        elif not x_win and not o_win and nx == 5 and no == 4:
            yield board, "negative"


def write_tictactoe(path):
    rows = sorted(terminal_boards())
    assert len(rows) == 958, len(rows)
    assert sum(cls == "positive" for _, cls in rows) == 626
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CELLS + ["class"])
        for board, cls in rows:
            w.writerow(list(board) + [cls])


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    write_titanic(os.path.join(OUT_DIR, "titanic.csv"))
    write_tictactoe(os.path.join(OUT_DIR, "tictactoe.csv"))
    print("wrote titanic.csv (2201 rows) and tictactoe.csv (958 rows)")


if __name__ == "__main__":
    main()
