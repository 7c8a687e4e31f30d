import sys

data = sys.stdin.read().split()
n = int(data[0]) if data else 0
values = sorted(set(int(t) for t in data[1:1 + n]), reverse=True)
# need two distinct values
if len(values) >= 2:
    print(values[1])
else:
    print(-1)
