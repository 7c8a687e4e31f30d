import sys

data = sys.stdin.read().split()
n = int(data[0]) if data else 0
for i in range(1, n + 1):
    print(" " * (n - i) + "#" * i)
