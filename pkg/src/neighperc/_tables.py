"""Small lookup tables shared by both kernel implementations."""

# model codes understood by the kernels
TWODP, IID, AON, NSEW, CORNER, ISO = 0, 1, 2, 3, 4, 5

# isotropic degree-two outcomes in sampling order: NE, NW, SW, SE, NS, EW
ISO_MASKS = (0b0011, 0b0110, 0b1100, 0b1001, 0b1010, 0b0101)

STEP = ((1, 0), (0, 1), (-1, 0), (0, -1))

# forbidden trails as step-direction words, with the two closed edges given
# relative to the walk's start vertex as (dx, dy, orientation), orientation
# 0 = edge to the east, 1 = edge to the north
WORDS = (
    ((1, 0, 3, 0, 1), ((0, 0, 0), (1, 1, 0))),      # horizontal, forwards
    ((3, 2, 1, 2, 3), ((-2, -1, 0), (-1, 0, 0))),   # horizontal, backwards
    ((2, 1, 0, 1, 2), ((0, 0, 1), (-1, 1, 1))),     # vertical, forwards
    ((0, 3, 2, 3, 0), ((1, -2, 1), (0, -1, 1))),    # vertical, backwards
)


def word_code(dirs):
    c = 0
    for d in dirs:
        c = 4 * c + d
    return c


# 5-step code -> index into WORDS (or -1)
WORD_INDEX = [-1] * 1024
for _i, (_w, _) in enumerate(WORDS):
    WORD_INDEX[word_code(_w)] = _i

# memory states: up to four remembered directions, index = offset[len] + code
MEM_OFFSET = (0, 1, 5, 21, 85)
MEM_STATES = 341
