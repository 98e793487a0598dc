package mini;

import java.security.MessageDigest;

public class PasswordDigestWithoutEncoding {

    /** Hashes the password with sha-256. */
    public byte[] hashPassword(String password) throws Exception {
        MessageDigest digest = MessageDigest.getInstance("SHA-256");
        digest.update(password.getBytes());
        return digest.digest();
    }
}
