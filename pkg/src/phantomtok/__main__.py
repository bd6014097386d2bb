from phantomtok.cli import main

main()
