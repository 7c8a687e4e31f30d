import sys


def digit_sum(v):
    v = abs(v)
    s = 0
    while v > 0:
        s += v % 10
        v //= 10
    return s


data = sys.stdin.read().split()
n = int(data[0]) if data else 0
for t in data[1:1 + n]:
    print(digit_sum(int(t)))
