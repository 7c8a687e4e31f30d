import sys

data = sys.stdin.read().split()
if len(data) < 2:
    a, b = 0, 0
else:
    a, b = int(data[0]), int(data[1])
print(a + b)
print(a - b)
print(a * b)
