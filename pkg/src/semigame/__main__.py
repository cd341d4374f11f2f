from semigame.cli import main

main()
