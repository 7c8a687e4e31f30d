n = int(input())
freq = {}
for _ in range(n):
    w = input().strip()
    freq[w] = freq.get(w, 0) + 1

# most frequent first, ties broken alphabetically
ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
word, times = ranked[0]
print(word, times)
