n = int(input())
best = ""
for _ in range(n):
    w = input().strip()
    # keep the first of equally long words
    if len(w) > len(best):
        best = w
print(best, len(best))
