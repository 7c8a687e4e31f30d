def is_palindrome(s):
    """Two-pointer check."""
    i, j = 0, len(s) - 1
    while i < j:
        if s[i] != s[j]:
            return False
        i += 1
        j -= 1
    return True


n = int(input())
count = 0
for _ in range(n):
    if is_palindrome(input().strip()):
        count += 1
print(count)
