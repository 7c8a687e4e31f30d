def encode(s):
    if not s:
        return ""
    parts = []
    prev = s[0]
    run = 1
    for ch in s[1:]:
        if ch == prev:
            run += 1
        else:
            parts.append(prev + str(run))
            prev = ch
            run = 1
    parts.append(prev + str(run))
    return "".join(parts)


n = int(input())
for _ in range(n):
    print(encode(input().strip()))
