import sys

data = sys.stdin.read().split()
n = int(data[0]) if data else 0
a = [int(t) for t in data[1:1 + n]]

# Kadane
best = a[0] if a else 0
cur = 0
for x in a:
    cur = max(x, cur + x)
    if cur > best:
        best = cur
print(best)
